use std::collections::BTreeSet;

use univoque::digits::BaseClass;
use univoque::graph::{self, check_isomorphic, count_label_paths, path_words, scc, tower_decompose, VertexKind};
use univoque::{BaseContext, PointName, UnivoqueGraph, Variant, Word};

fn ctx(m: u8, beta: &str) -> BaseContext {
    BaseContext::parse(m, beta).unwrap()
}

fn p(name: &str) -> PointName {
    name.parse().unwrap()
}

const BATTERY: &[(u8, &str)] =
    &[(1, "111(0)"), (1, "11011(0)"), (4, "4331(0)"), (3, "331(0)"), (4, "322(0)"), (1, "111001010(0)")];

/// The battery and the successor of each member.
fn battery_contexts() -> Vec<BaseContext> {
    BATTERY
        .iter()
        .flat_map(|&(m, b)| {
            let c = ctx(m, b);
            let s = c.v_successor().unwrap();
            [c, s]
        })
        .collect()
}

#[test]
fn vertex_count_formulas() {
    for c in battery_contexts() {
        let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
        let n = c.n_period();
        let m = c.m() as usize;
        let expect = match c.class() {
            BaseClass::InClosureUNotU => 2 * n + m - 1,
            _ => n + m - 1,
        };
        assert_eq!(g.len(), expect, "β = {}", c.beta());
    }
}

#[test]
fn golden_ratio_with_even_alphabet_has_two_loops() {
    let c = BaseContext::golden_ratio_base(2).unwrap();
    let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
    assert_eq!(g.len(), 2);
    let mut loops: Vec<(usize, u8, usize)> = g.edges().iter().map(|e| (e.from, e.label, e.to)).collect();
    loops.sort();
    assert_eq!(loops, vec![(0, 0, 0), (1, 2, 1)]);
    for len in [0, 1, 5, 9] {
        assert_eq!(count_label_paths(&g, len), if len == 0 { 1 } else { 2 });
    }
    let words = path_words(&g, 4).unwrap();
    assert_eq!(words, vec![Word::new(vec![0; 4]), Word::new(vec![2; 4])]);
}

#[test]
fn tribonacci_full_graph_size() {
    let g = UnivoqueGraph::build(&ctx(1, "111(0)"), Variant::Full).unwrap();
    assert_eq!(g.len(), 6);
}

fn fixture_322() -> (UnivoqueGraph, Vec<usize>) {
    let g = UnivoqueGraph::build(&ctx(4, "322(0)"), Variant::Tilde).unwrap();
    let ids = [("b1", "a3"), ("η2", "a2"), ("a2", "b2"), ("b2", "θ3"), ("b3", "a1")]
        .iter()
        .map(|(l, r)| g.find_vertex(p(l), p(r)).unwrap_or_else(|| panic!("missing vertex ({l},{r})")))
        .collect();
    (g, ids)
}

#[test]
fn reduced_graph_of_322_matches_the_published_edge_list() {
    let (g, v) = fixture_322();
    assert_eq!(g.len(), 5);
    let [b1a3, e2a2, a2b2, b2t3, b3a1] = [v[0], v[1], v[2], v[3], v[4]];
    let expected: BTreeSet<(usize, u8, usize)> = [
        (b1a3, 1, b2t3),
        (b1a3, 1, b3a1),
        (e2a2, 2, b1a3),
        (b2t3, 2, b3a1),
        (b3a1, 3, b1a3),
        (b3a1, 3, e2a2),
        (a2b2, 2, e2a2),
        (a2b2, 2, a2b2),
        (a2b2, 2, b2t3),
    ]
    .into_iter()
    .collect();
    let got: BTreeSet<(usize, u8, usize)> = g.edges().iter().map(|e| (e.from, e.label, e.to)).collect();
    assert_eq!(got, expected);
}

#[test]
fn reduced_graph_of_322_has_two_components() {
    let (g, v) = fixture_322();
    let r = scc(&g);
    assert!(!r.strongly_connected);
    let mut comps: Vec<Vec<usize>> = r.components.clone();
    comps.sort_by_key(Vec::len);
    assert_eq!(comps[0], vec![v[2]]);
    let mut big = vec![v[0], v[1], v[3], v[4]];
    big.sort();
    assert_eq!(comps[1], big);
    assert_eq!(r.condensation.len(), 1);
}

#[test]
fn tribonacci_reduced_graph_is_strongly_connected() {
    let g = UnivoqueGraph::build(&ctx(1, "111(0)"), Variant::Tilde).unwrap();
    assert!(scc(&g).strongly_connected);
}

#[test]
fn edge_reflection_symmetry() {
    for c in battery_contexts() {
        let m = c.m();
        for variant in [Variant::Full, Variant::Tilde] {
            let g = UnivoqueGraph::build(&c, variant).unwrap();
            for e in g.edges() {
                let rf = g.reflect_vertex(e.from).expect("reflected source");
                let rt = g.reflect_vertex(e.to).expect("reflected target");
                assert!(
                    g.has_edge(rf, m - e.label, rt),
                    "β = {} edge {} -> {}",
                    c.beta(),
                    g.vertex_name(e.from),
                    g.vertex_name(e.to)
                );
            }
        }
    }
}

#[test]
fn out_labels_are_uniform_and_forced() {
    for c in battery_contexts() {
        let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
        for (v, x) in g.vertices().iter().enumerate() {
            assert!(!g.successors(v).is_empty(), "vertex {} has no successor", g.vertex_name(v));
            for e in g.edges().iter().filter(|e| e.from == v) {
                assert_eq!(e.label, x.label);
            }
            // The forced digit d satisfies θ_d ≤ left and right ≤ η_{d+1}.
            let order = g.order();
            let d = x.label as usize;
            assert!(order.class_of(PointName::Theta(d)).unwrap() <= x.left);
            assert!(x.right <= order.class_of(PointName::Eta(d + 1)).unwrap());
        }
    }
}

#[test]
fn reduced_one_graph_is_strongly_connected_and_reads_alpha() {
    for c in battery_contexts().into_iter().filter(|c| c.class() == BaseClass::InClosureUNotU) {
        let g = UnivoqueGraph::build(&c, Variant::Tilde1).unwrap();
        assert!(scc(&g).strongly_connected, "β = {}", c.beta());
        let w = c.alpha_word();
        let words = path_words(&g, w.len()).unwrap();
        assert!(words.contains(&w));
        assert!(words.contains(&w.reflect(c.m()).unwrap()));
    }
}

#[test]
fn vertices_below_b1_are_entered_only_from_the_first_vertex() {
    for c in battery_contexts() {
        let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
        let b1 = g.order().class_of(PointName::B(1)).unwrap();
        for e in g.edges() {
            if g.vertices()[e.to].right <= b1 {
                assert_eq!(g.vertices()[e.from].left, 0, "β = {}", c.beta());
                assert_eq!(e.label, 0);
            }
        }
    }
}

#[test]
fn vertex_kinds_follow_endpoints() {
    let (g, v) = fixture_322();
    assert!(g.vertices()[v[2]].has_kind(VertexKind::Ab));
    assert!(g.vertices()[v[3]].has_kind(VertexKind::BLeft));
    assert!(g.vertices()[v[3]].has_kind(VertexKind::ThetaLeft));
    assert!(g.vertices()[v[0]].has_kind(VertexKind::ARight));
}

#[test]
fn connectivity_criteria() {
    let r = graph::connectivity_report(&ctx(1, "111001010(0)")).unwrap();
    assert_eq!(r.b2_below_inner_a, Some(false));
    assert!(r.reachability_criterion && r.strongly_connected);
    let r = graph::connectivity_report(&ctx(4, "4331(0)")).unwrap();
    assert_eq!(r.b2_below_inner_a, Some(true));
    assert!(r.strongly_connected);
    let r = graph::connectivity_report(&ctx(1, "111001000111001(0)")).unwrap();
    assert!(!r.strongly_connected);
    assert_eq!(r.unreached.len(), 4);
    let r = graph::connectivity_report(&ctx(2, "222002000222002(0)")).unwrap();
    assert!(r.strongly_connected);
}

#[test]
fn sufficient_condition_implies_connectivity() {
    for &(m, b) in BATTERY {
        let r = graph::connectivity_report(&ctx(m, b)).unwrap();
        assert_eq!(r.reachability_criterion, r.strongly_connected);
        if r.b2_below_inner_a == Some(true) {
            assert!(r.strongly_connected, "β = {b}");
        }
    }
}

#[test]
fn isomorphism_along_successor_chains() {
    for (m, b) in [(1, "111(0)"), (3, "331(0)")] {
        let q0 = ctx(m, b);
        let q1 = q0.v_successor().unwrap();
        let q2 = q1.v_successor().unwrap();
        let g0 = UnivoqueGraph::build(&q0, Variant::Full).unwrap();
        let g1 = UnivoqueGraph::build(&q1, Variant::Full).unwrap();
        let g2 = UnivoqueGraph::build(&q2, Variant::Full).unwrap();
        let f = check_isomorphic(&g0, &g1).expect("G(q0) ≅ G(q1)");
        assert_eq!(f, (0..g0.len()).collect::<Vec<_>>());
        assert!(check_isomorphic(&g1, &g2).is_none());
        assert_eq!(check_isomorphic(&g2, &g2), Some((0..g2.len()).collect()));
    }
}

#[test]
fn exhaustive_isomorphism_search_finds_relabelings() {
    let g = UnivoqueGraph::build(&ctx(1, "111(0)"), Variant::Full).unwrap();
    let perm: Vec<usize> = (0..g.len()).rev().collect();
    let shuffled = g.induced(&perm);
    assert!(check_isomorphic(&g, &shuffled).is_some());
    let tilde = UnivoqueGraph::build(&ctx(4, "322(0)"), Variant::Tilde).unwrap();
    let other = UnivoqueGraph::build(&ctx(1, "11011(0)"), Variant::Tilde).unwrap();
    assert!(check_isomorphic(&tilde, &other).is_none());
}

#[test]
fn tower_of_331() {
    let t = tower_decompose(&ctx(3, "331(0)"), 3).unwrap();
    // V₁ spans a copy of G(q₁), which has 2n + M − 1 vertices.
    assert_eq!(t.block_sizes(), vec![2 * 3 + 3 - 1, 6, 12]);
    let words: Vec<String> = t.cycle_words.iter().map(ToString::to_string).collect();
    assert_eq!(words, vec!["331002", "331003002330"]);
    for (c, b) in t.cycles.iter().zip(&t.blocks[1..]) {
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(&sorted, b);
    }
}

#[test]
fn tower_of_tribonacci() {
    let t = tower_decompose(&ctx(1, "111(0)"), 3).unwrap();
    assert_eq!(t.block_sizes(), vec![6, 6, 12]);
    let words: Vec<String> = t.cycle_words.iter().map(ToString::to_string).collect();
    assert_eq!(words, vec!["111000", "111001000110"]);
}

#[test]
fn tower_of_depth_one_is_a_single_block() {
    let t = tower_decompose(&ctx(1, "111(0)"), 1).unwrap();
    assert_eq!(t.blocks.len(), 1);
    assert!(t.cycles.is_empty());
}

#[test]
fn word_counts_agree_with_word_lists() {
    for c in battery_contexts() {
        let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
        for len in 0..=8 {
            let words = path_words(&g, len).unwrap();
            assert_eq!(words.len() as u128, count_label_paths(&g, len));
            assert!(words.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn dot_and_json_exports() {
    let (g, _) = fixture_322();
    let dot = g.to_dot();
    assert_eq!(dot.matches("[label=\"(").count(), 5);
    assert_eq!(dot.matches("->").count(), 9);
    assert!(dot.contains("\"(a2,b2)\""));
    let v = serde_json::to_value(g.to_view()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(v["edges"].as_array().unwrap().len(), 9);
    assert_eq!(g.to_dot(), fixture_322().0.to_dot());
}

#[test]
fn graphs_require_a_supported_class() {
    assert!(UnivoqueGraph::build(&ctx(1, "(1)"), Variant::Full).is_err());
    assert!(graph::connectivity_report(&ctx(1, "111001(0)")).is_err());
}

#[test]
fn every_vertex_of_the_battery_graphs_has_an_in_edge() {
    for (m, beta) in [(1, "111(0)"), (1, "11011(0)"), (4, "4331(0)"), (3, "331(0)"), (4, "322(0)"), (1, "111001010(0)")]
    {
        let c = BaseContext::parse(m, beta).unwrap();
        let g = UnivoqueGraph::build(&c, Variant::Full).unwrap();
        assert!(graph::vertices_without_in_edges(&g).is_empty(), "{beta}");
        assert!(graph::connectivity_report(&c).unwrap().without_in_edges.is_empty());
    }
}
