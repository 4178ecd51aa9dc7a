use proptest::prelude::*;
use univoque::digits::{is_unique_expansion_seq, EpSeq, ExpansionMode, Strictness};
use univoque::expansions::{
    alpha_structure, build_witness_xm, carry_prefixes_below, count_expansions, default_witness_tail, f_family_filter,
    greedy_expand, quasi_greedy_expand, CountKind, FilterCondition, DEFAULT_CAP,
};
use univoque::oracle::brute_count_expansions;
use univoque::{BaseContext, Error, PointName, Word};

fn s(x: &str) -> EpSeq {
    x.parse().unwrap()
}

fn ctx(m: u8, beta: &str) -> BaseContext {
    BaseContext::parse(m, beta).unwrap()
}

const BATTERY: &[(u8, &str)] =
    &[(1, "111(0)"), (1, "11011(0)"), (4, "4331(0)"), (3, "331(0)"), (4, "322(0)"), (1, "111001010(0)")];

#[test]
fn greedy_expansions() {
    let t = ctx(1, "111(0)");
    assert_eq!(greedy_expand(&t, &t.int(1), 5).unwrap(), Word::new(vec![1, 1, 1, 0, 0]));
    assert_eq!(greedy_expand(&t, &t.int(0), 6).unwrap(), Word::new(vec![0; 6]));
    let c = ctx(3, "331(0)");
    let sp = c.special_points().unwrap();
    for j in 1..=3u8 {
        let theta = &sp.get(PointName::Theta(j as usize)).unwrap().value;
        let mut expect = vec![0; 7];
        expect[0] = j;
        assert_eq!(greedy_expand(&c, theta, 7).unwrap(), Word::new(expect));
    }
    assert!(matches!(greedy_expand(&t, &t.int(5), 3), Err(Error::OutOfRange(_))));
}

#[test]
fn greedy_expansion_is_maximal() {
    let t = ctx(1, "111(0)");
    let x = t.value_of(&s("01(011)"));
    let g = greedy_expand(&t, &x, 12).unwrap();
    for i in 0..12 {
        if g.digits()[i] < 1 {
            let mut d = g.digits()[..i].to_vec();
            d.push(g.digits()[i] + 1);
            assert!(x.sub(&t.value_of(&EpSeq::finite(d))).signum().is_lt(), "position {i}");
        }
    }
}

#[test]
fn quasi_greedy_expansions_of_special_points() {
    for &(m, b) in BATTERY {
        let c = ctx(m, b);
        assert_eq!(quasi_greedy_expand(&c, &c.int(1)).unwrap(), *c.alpha());
        let sp = c.special_points().unwrap();
        for p in sp.partition_points() {
            let q = quasi_greedy_expand(&c, &p.value).unwrap();
            assert_eq!(q, p.key, "{b} {}", p.name);
            assert_eq!(c.value_of(&q), p.value);
        }
        // The b-points have infinite greedy expansions equal to their keys.
        for i in 1..=c.n_period() {
            let bp = sp.get(PointName::B(i)).unwrap();
            assert_eq!(greedy_expand(&c, &bp.value, 30).unwrap(), bp.key.prefix(30));
        }
    }
}

#[test]
fn zero_has_one_expansion() {
    let t = ctx(1, "111(0)");
    let r = count_expansions(&t, &t.int(0), DEFAULT_CAP).unwrap();
    assert_eq!(r.kind, CountKind::Exact(1));
    assert_eq!(r.witnesses, vec![EpSeq::zero()]);
}

#[test]
fn one_in_base_two_with_three_digits_has_countably_many() {
    let c = ctx(2, "2(0)");
    let r = count_expansions(&c, &c.int(1), DEFAULT_CAP).unwrap();
    assert_eq!(r.kind, CountKind::InfiniteCycle);
    let b = brute_count_expansions(&c, &c.int(1), 12).unwrap();
    assert!(b.feasible >= 12);
    assert!(b.exact().is_none());
}

#[test]
fn tiny_cap_is_reported() {
    let t = ctx(1, "111(0)");
    let x = t.value_of(&s("1(01001)"));
    let r = count_expansions(&t, &x, 1).unwrap();
    assert_eq!(r.kind, CountKind::CapExceeded);
}

/// Default tails and the counts of their witnesses, checked by exhaustive
/// search and the brute-force bounds.
const DEFAULT_TAILS: &[(u8, &str, &str)] = &[
    (1, "111(0)", "0(01001)"),
    (4, "322(0)", "12(31231)"),
    (3, "331(0)", "003(00301)"),
    (4, "4331(0)", "0114(0114012)"),
    (1, "11011(0)", "0010(100101001)"),
];

#[test]
fn default_tails() {
    for &(m, b, tail) in DEFAULT_TAILS {
        let c = ctx(m, b);
        assert_eq!(default_witness_tail(&c).unwrap(), s(tail), "{b}");
        let f = f_family_filter(&c, &s(tail), Strictness::Strict).unwrap();
        assert!(f.passed && f.normal_form);
    }
}

#[test]
fn witnesses_have_exactly_m_expansions() {
    for &(m, b, tail) in DEFAULT_TAILS {
        let c = ctx(m, b);
        for k in 1..=4 {
            let w = build_witness_xm(&c, k, &s(tail)).unwrap();
            assert_eq!(w.expansions.len(), k);
            let r = count_expansions(&c, &w.value, DEFAULT_CAP).unwrap();
            assert_eq!(r.kind, CountKind::Exact(k), "{b} m={k}");
            let mut listed = w.expansions.clone();
            listed.sort();
            let mut found = r.witnesses.clone();
            found.sort();
            assert_eq!(listed, found);
        }
    }
}

#[test]
fn brute_force_bounds_confirm_witness_counts() {
    for &(m, b, tail) in &DEFAULT_TAILS[..3] {
        let c = ctx(m, b);
        for k in 1..=3 {
            let w = build_witness_xm(&c, k, &s(tail)).unwrap();
            let bounds = brute_count_expansions(&c, &w.value, 12).unwrap();
            assert_eq!(bounds.exact(), Some(k), "{b} m={k} {bounds:?}");
        }
    }
}

#[test]
fn periodic_tail_001_passes_only_the_weak_filter() {
    let t = ctx(1, "111(0)");
    let c = s("(001)");
    let weak = f_family_filter(&t, &c, Strictness::Weak).unwrap();
    assert!(weak.passed && weak.normal_form);
    let strict = f_family_filter(&t, &c, Strictness::Strict).unwrap();
    assert!(!strict.passed);
    assert!(matches!(build_witness_xm(&t, 2, &c), Err(Error::FilterFailed(_))));
    // With this tail the points 1 0^{3(m−1)} (001)^∞ have infinitely many
    // expansions.
    for k in 1..=4usize {
        let mut head = vec![1];
        head.extend(std::iter::repeat_n(0, 3 * (k - 1)));
        let x = t.value_of(&c.prepend(&head));
        assert_eq!(count_expansions(&t, &x, DEFAULT_CAP).unwrap().kind, CountKind::InfiniteCycle);
    }
}

#[test]
fn zero_tail_fails_the_filter() {
    for &(m, b) in BATTERY {
        let c = ctx(m, b);
        for how in [Strictness::Strict, Strictness::Weak] {
            let r = f_family_filter(&c, &EpSeq::zero(), how).unwrap();
            assert!(!r.passed);
            assert_eq!(r.failure.unwrap().condition, FilterCondition::ReflectedTailBelowAlpha);
        }
    }
}

#[test]
fn carried_prefixes_stay_below_alpha_of_the_left_endpoint() {
    let pl = ctx(1, "111(0)");
    let c = default_witness_tail(&pl).unwrap();
    for k in 1..=3 {
        let r = pl.r_chain(k).unwrap();
        assert_eq!(carry_prefixes_below(&r, &c, pl.alpha(), Strictness::Strict).unwrap(), None, "r_{k}");
    }
}

#[test]
fn alpha_structure_along_the_r_chain() {
    let pl = ctx(1, "111(0)");
    let r0 = alpha_structure(&pl, &pl).unwrap().unwrap();
    assert!(r0.trivial);
    for k in 1..=3usize {
        let r = pl.r_chain(k).unwrap();
        let a = alpha_structure(&r, &pl).unwrap().unwrap();
        assert!(!a.trivial);
        assert_eq!(a.w, Word::new(vec![1, 1, 0]));
        assert!(a.bounded_by_first);
        // α(r_k) = w⁺ (\overline{w}^{k−1} \overline{w⁺}) (w⁰ w⁺) ⋯, so the
        // exponents repeat k−1, 0.
        assert!(a.ks_preperiod.is_empty());
        let ks: Vec<usize> = a.ks_period.iter().copied().cycle().take(4).collect();
        assert_eq!(ks, vec![k - 1, 0, k - 1, 0]);
        assert_eq!(a.greedy_tail_power, Some(k));
    }
    assert_eq!(pl.r_chain(2).unwrap().beta(), &s("111001001(0)"));
    let outside = ctx(1, "11(0)");
    assert!(alpha_structure(&outside, &pl).unwrap().is_none());
    assert!(alpha_structure(&pl.p_right().unwrap(), &pl).unwrap().is_none());
}

#[test]
fn witness_tail_search_fails_outside_closure_of_u() {
    // No tail starting with the reflected period passes the strict filter.
    for beta in ["111001(0)", "1101(0)", "11010011(0)"] {
        let c = ctx(1, beta);
        assert!(matches!(default_witness_tail(&c), Err(Error::FilterFailed(_))), "{beta}");
    }
}

#[test]
fn unique_count_matches_lexicographic_test_on_special_points() {
    for &(m, b) in BATTERY {
        let c = ctx(m, b);
        let sp = c.special_points().unwrap();
        for p in sp.partition_points() {
            let count = count_expansions(&c, &p.value, DEFAULT_CAP).unwrap();
            let qg = quasi_greedy_expand(&c, &p.value).unwrap();
            let unique = is_unique_expansion_seq(c.alpha(), &qg, m, ExpansionMode::Unique);
            assert_eq!(count.kind == CountKind::Exact(1), unique, "{b} {}", p.name);
        }
    }
}

#[test]
fn json_shape_of_counts() {
    let t = ctx(1, "111(0)");
    let r = count_expansions(&t, &t.int(0), DEFAULT_CAP).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["kind"]["kind"], "EXACT");
    assert_eq!(v["kind"]["count"], 1);
    assert_eq!(CountKind::Exact(3).to_string(), "EXACT(3)");
}

fn arb_point() -> impl Strategy<Value = (usize, EpSeq)> {
    (0..BATTERY.len()).prop_flat_map(|i| {
        let m = BATTERY[i].0;
        (Just(i), prop::collection::vec(0..=m, 0..4), prop::collection::vec(0..=m, 1..4))
            .prop_map(|(i, pre, per)| (i, EpSeq::new(pre, per).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn counts_are_symmetric_under_reflection((i, seq) in arb_point()) {
        let (m, b) = BATTERY[i];
        let c = ctx(m, b);
        let x = c.value_of(&seq);
        let y = c.max_value().sub(&x);
        let cx = count_expansions(&c, &x, DEFAULT_CAP).unwrap();
        let cy = count_expansions(&c, &y, DEFAULT_CAP).unwrap();
        prop_assert_eq!(cx.kind, cy.kind);
        let mut rx: Vec<EpSeq> = cx.witnesses.iter().map(|w| w.reflect(m).unwrap()).collect();
        rx.sort();
        let mut wy = cy.witnesses.clone();
        wy.sort();
        prop_assert_eq!(rx, wy);
    }

    #[test]
    fn quasi_greedy_round_trip((i, seq) in arb_point()) {
        let (m, b) = BATTERY[i];
        let c = ctx(m, b);
        let x = c.value_of(&seq);
        let q = quasi_greedy_expand(&c, &x).unwrap();
        prop_assert_eq!(c.value_of(&q), x);
        prop_assert!(!q.is_finite() || q.is_zero());
    }

    #[test]
    fn unique_count_matches_lexicographic_test((i, seq) in arb_point()) {
        let (m, b) = BATTERY[i];
        let c = ctx(m, b);
        let x = c.value_of(&seq);
        let count = count_expansions(&c, &x, DEFAULT_CAP).unwrap();
        let qg = quasi_greedy_expand(&c, &x).unwrap();
        let unique = is_unique_expansion_seq(c.alpha(), &qg, m, ExpansionMode::Unique);
        prop_assert_eq!(count.kind == CountKind::Exact(1), unique);
    }

    #[test]
    fn brute_bounds_bracket_exact_counts((i, seq) in arb_point()) {
        let (m, b) = BATTERY[i];
        let c = ctx(m, b);
        let x = c.value_of(&seq);
        let count = count_expansions(&c, &x, DEFAULT_CAP).unwrap();
        let bounds = brute_count_expansions(&c, &x, 8).unwrap();
        match count.kind {
            CountKind::Exact(k) => {
                prop_assert!(bounds.feasible <= k);
                if let Some(e) = bounds.exact() {
                    prop_assert_eq!(e, k);
                }
            }
            CountKind::InfiniteCycle => prop_assert!(bounds.feasible >= 1),
            CountKind::CapExceeded => {}
        }
    }
}
