use univoque::digits::{is_unique_expansion_seq, EpSeq, ExpansionMode};
use univoque::expansions::{build_witness_xm, default_witness_tail};
use univoque::graph::path_words;
use univoque::oracle::{brute_count_expansions, enumerate_admissible_words, follower_state_count, WordMode};
use univoque::{BaseContext, UnivoqueGraph, Variant, Word};

fn ctx(m: u8, beta: &str) -> BaseContext {
    BaseContext::parse(m, beta).unwrap()
}

fn strs(words: &[Word]) -> Vec<String> {
    words.iter().map(ToString::to_string).collect()
}

/// Words of length `len` that extend, by some tail `u v^∞` with short `u`
/// and `v`, to a sequence passing the lexicographic test directly.
fn words_by_direct_search(c: &BaseContext, len: usize, mode: ExpansionMode, max_part: usize) -> Vec<String> {
    let m = c.m();
    let radix = m as usize + 1;
    let all = |k: usize| -> Vec<Vec<u8>> {
        (0..radix.pow(k as u32))
            .map(|mut code| {
                let mut w = vec![0u8; k];
                for slot in w.iter_mut().rev() {
                    *slot = (code % radix) as u8;
                    code /= radix;
                }
                w
            })
            .collect()
    };
    let tails: Vec<(Vec<u8>, Vec<u8>)> = (0..=max_part)
        .flat_map(|a| (1..=max_part).map(move |b| (a, b)))
        .flat_map(|(a, b)| all(a).into_iter().flat_map(move |u| all(b).into_iter().map(move |v| (u.clone(), v))))
        .collect();
    let mut out = Vec::new();
    for w in all(len) {
        let ok = tails.iter().any(|(u, v)| {
            let mut pre = w.clone();
            pre.extend_from_slice(u);
            let s = EpSeq::new(pre, v.clone()).unwrap();
            is_unique_expansion_seq(c.alpha(), &s, m, mode)
        });
        if ok {
            out.push(Word::new(w).to_string());
        }
    }
    out
}

#[test]
fn golden_ratio_words_of_length_three() {
    let g = ctx(1, "11(0)");
    let words = strs(&enumerate_admissible_words(&g, 3, WordMode::VPrefix).unwrap());
    // 011 and 100 are excluded: after the first digit the tail 11⋯ (or its
    // reflection) exceeds (10)^∞.
    assert_eq!(words, vec!["000", "001", "010", "101", "110", "111"]);
    assert_eq!(words, words_by_direct_search(&g, 3, ExpansionMode::DoublyInfinite, 3));
    let unique = strs(&enumerate_admissible_words(&g, 3, WordMode::UPrefix).unwrap());
    assert_eq!(unique, vec!["000", "111"]);
}

#[test]
fn empty_words() {
    for (m, b) in [(1, "111(0)"), (4, "322(0)")] {
        let c = ctx(m, b);
        for mode in [WordMode::UPrefix, WordMode::VPrefix] {
            assert_eq!(enumerate_admissible_words(&c, 0, mode).unwrap(), vec![Word::empty()]);
        }
    }
}

#[test]
fn automaton_agrees_with_direct_search() {
    for (m, b) in [(1, "111(0)"), (1, "11011(0)"), (2, "2222(0)")] {
        let c = ctx(m, b);
        for len in 1..=4 {
            let auto = strs(&enumerate_admissible_words(&c, len, WordMode::VPrefix).unwrap());
            assert_eq!(auto, words_by_direct_search(&c, len, ExpansionMode::DoublyInfinite, 3), "{b} L={len}");
        }
    }
    let q1 = ctx(1, "111(0)").v_successor().unwrap();
    for len in 1..=4 {
        let auto = strs(&enumerate_admissible_words(&q1, len, WordMode::UPrefix).unwrap());
        assert_eq!(auto, words_by_direct_search(&q1, len, ExpansionMode::Unique, 4), "q1 L={len}");
    }
}

#[test]
fn tribonacci_words_match_graph_paths() {
    let t = ctx(1, "111(0)");
    let g = UnivoqueGraph::build(&t, Variant::Full).unwrap();
    assert_eq!(enumerate_admissible_words(&t, 8, WordMode::VPrefix).unwrap(), path_words(&g, 8).unwrap());
    let q1 = t.v_successor().unwrap();
    let g1 = UnivoqueGraph::build(&q1, Variant::Full).unwrap();
    assert_eq!(enumerate_admissible_words(&q1, 8, WordMode::UPrefix).unwrap(), path_words(&g1, 8).unwrap());
}

#[test]
fn length_limit() {
    let t = ctx(1, "111(0)");
    assert!(enumerate_admissible_words(&t, 13, WordMode::VPrefix).is_err());
    assert!(
        follower_state_count(&t, WordMode::UPrefix).unwrap() >= follower_state_count(&t, WordMode::VPrefix).unwrap()
    );
}

#[test]
fn brute_bounds_for_zero() {
    let t = ctx(1, "111(0)");
    let b = brute_count_expansions(&t, &t.int(0), 10).unwrap();
    assert_eq!((b.pinned, b.feasible), (1, 1));
}

#[test]
fn brute_bounds_for_the_two_expansion_witness() {
    let t = ctx(1, "111(0)");
    let c = default_witness_tail(&t).unwrap();
    let x = build_witness_xm(&t, 2, &c).unwrap().value;
    let b = brute_count_expansions(&t, &x, 18).unwrap();
    assert_eq!((b.pinned, b.feasible), (2, 2));
}

#[test]
fn brute_bounds_grow_for_countably_many_expansions() {
    let c = ctx(2, "2(0)");
    let shallow = brute_count_expansions(&c, &c.int(1), 8).unwrap();
    let deep = brute_count_expansions(&c, &c.int(1), 12).unwrap();
    assert!(deep.feasible >= 12);
    assert!(deep.feasible > shallow.feasible);
    assert!(brute_count_expansions(&c, &c.int(1), 25).is_err());
}
