use proptest::prelude::*;

use localind::digraph::ordered_pairs;
use localind::{delta_separates, delta_separates_trail, DiGraph, NodeSet, SeparationQuery};

const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn graph_and_query() -> impl Strategy<Value = (DiGraph, SeparationQuery)> {
    (2usize..=6).prop_flat_map(|n| {
        let m = (1u64 << n) - 1;
        let pairs = (n * (n - 1)) as u32;
        (
            0u64..(1u64 << pairs),
            0u64..=m,
            0u64..=m,
            0u64..=m,
        )
            .prop_map(move |(bits, a, b, c)| {
                let g = DiGraph::from_edge_bits(&LABELS[..n], bits).unwrap();
                let q = SeparationQuery::new(NodeSet::from_bits(a), NodeSet::from_bits(b), NodeSet::from_bits(c));
                (g, q)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn moral_and_trail_methods_agree((g, q) in graph_and_query()) {
        prop_assert_eq!(delta_separates(&g, &q).unwrap(), delta_separates_trail(&g, &q).unwrap());
    }

    #[test]
    fn reduction_preserves_the_answer((g, q) in graph_and_query()) {
        let r = q.reduced();
        prop_assert!(r.is_disjoint());
        prop_assert_eq!(delta_separates(&g, &q).unwrap(), delta_separates(&g, &r).unwrap());
    }

    #[test]
    fn empty_sides_are_separated((g, q) in graph_and_query()) {
        prop_assert!(delta_separates(&g, &SeparationQuery::new(NodeSet::EMPTY, q.b, q.c)).unwrap());
        prop_assert!(delta_separates(&g, &SeparationQuery::new(q.a, NodeSet::EMPTY, q.c)).unwrap());
    }

    #[test]
    fn edges_out_of_b_are_irrelevant((g, q) in graph_and_query()) {
        let h = g.delete_out_edges(q.b).unwrap();
        prop_assert_eq!(delta_separates(&g, &q).unwrap(), delta_separates(&h, &q).unwrap());
    }

    #[test]
    fn adding_an_edge_never_creates_separation((g, q) in graph_and_query(), pick in any::<prop::sample::Index>()) {
        let n = g.node_count();
        let (j, k) = pick.get(&ordered_pairs(n)).to_owned();
        let mut edges: Vec<(&str, &str)> = g.edges().into_iter().map(|(x, y)| (LABELS[x], LABELS[y])).collect();
        edges.push((LABELS[j], LABELS[k]));
        edges.dedup();
        let bigger = DiGraph::new(&LABELS[..n], &edges).unwrap();
        if delta_separates(&bigger, &q).unwrap() {
            prop_assert!(delta_separates(&g, &q).unwrap());
        }
    }

    #[test]
    fn only_the_ancestral_set_matters((g, q) in graph_and_query()) {
        let an = g.ancestral_set(q.a | q.b | q.c).unwrap();
        let sub = g.induced_subgraph(an).unwrap();
        prop_assert_eq!(delta_separates(&g, &q).unwrap(), delta_separates(&sub, &q).unwrap());
    }
}

#[test]
fn separation_is_asymmetric_on_a_three_cycle() {
    let g = DiGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
    let q = |a, b| SeparationQuery::from_names(&g, [a], [b], ["c"]).unwrap();
    for decide in [delta_separates, delta_separates_trail] {
        assert!(!decide(&g, &q("a", "b")).unwrap());
        assert!(decide(&g, &q("b", "a")).unwrap());
    }
}
