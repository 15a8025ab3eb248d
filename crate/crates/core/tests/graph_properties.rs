use covdep_core::enumerate::node_pairs;
use covdep_core::{MixedGraph, NodeSet};
use proptest::prelude::*;

/// Random mixed graph on up to 7 nodes: each pair is absent, undirected, or
/// an arrow in either direction.
fn mixed_graph() -> impl Strategy<Value = MixedGraph> {
    (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(0u8..4, n * (n - 1) / 2).prop_map(move |kinds| {
            let mut g = MixedGraph::with_default_labels(n).unwrap();
            for (&(a, b), kind) in node_pairs(n).iter().zip(kinds) {
                match kind {
                    1 => g.add_undirected(a, b).unwrap(),
                    2 => g.add_directed(a, b).unwrap(),
                    3 => g.add_directed(b, a).unwrap(),
                    _ => {}
                }
            }
            g
        })
    })
}

/// Random directed graph (cycles allowed) on up to 7 nodes.
fn directed_graph() -> impl Strategy<Value = MixedGraph> {
    (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(0u8..3, n * (n - 1) / 2).prop_map(move |kinds| {
            let mut g = MixedGraph::with_default_labels(n).unwrap();
            for (&(a, b), kind) in node_pairs(n).iter().zip(kinds) {
                match kind {
                    1 => g.add_directed(a, b).unwrap(),
                    2 => g.add_directed(b, a).unwrap(),
                    _ => {}
                }
            }
            g
        })
    })
}

fn subset_of(g: &MixedGraph, mask: u64) -> NodeSet {
    NodeSet::from_bits(mask) & g.vertices()
}

/// Kahn's algorithm: true iff a topological order exists.
fn kahn_acyclic(g: &MixedGraph) -> bool {
    let n = g.labels().len();
    let mut indegree: Vec<usize> = (0..n).map(|v| g.parents(v).len()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for c in g.children(v) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    seen == n
}

proptest! {
    #[test]
    fn induced_subgraph_filters_edges(g in mixed_graph(), mask in any::<u64>()) {
        let keep = subset_of(&g, mask);
        let sub = g.induced_subgraph(keep);
        let expect_u: Vec<_> = g.undirected_edges().into_iter()
            .filter(|&(a, b)| keep.contains(a) && keep.contains(b)).collect();
        let expect_d: Vec<_> = g.directed_edges().into_iter()
            .filter(|&(a, b)| keep.contains(a) && keep.contains(b)).collect();
        prop_assert_eq!(sub.undirected_edges(), expect_u);
        prop_assert_eq!(sub.directed_edges(), expect_d);
        prop_assert_eq!(sub.vertices(), keep);
    }

    #[test]
    fn ancestors_monotone_and_idempotent(g in mixed_graph(), a in any::<u64>(), b in any::<u64>()) {
        let small = subset_of(&g, a & b);
        let large = subset_of(&g, a);
        let an_small = g.ancestors(small);
        prop_assert!(small.is_subset(an_small));
        prop_assert!(an_small.is_subset(g.ancestors(large)));
        prop_assert_eq!(g.ancestors(an_small), an_small);
    }

    #[test]
    fn components_partition_vertices(g in mixed_graph()) {
        let comps = g.connectivity_components();
        let mut union = NodeSet::EMPTY;
        for c in &comps {
            prop_assert!(!c.is_empty());
            prop_assert!(union.is_disjoint(*c));
            union |= *c;
        }
        prop_assert_eq!(union, g.vertices());
        // no undirected edge crosses components
        for (a, b) in g.undirected_edges() {
            prop_assert!(comps.iter().any(|c| c.contains(a) && c.contains(b)));
        }
    }

    #[test]
    fn moral_graph_of_ug_is_identity(g in mixed_graph()) {
        let ug = MixedGraph::undirected(g.labels().iter().cloned(), &g.undirected_edges()).unwrap();
        prop_assert_eq!(ug.moral_graph(), ug);
    }

    #[test]
    fn moral_graph_keeps_adjacencies(g in mixed_graph()) {
        let m = g.moral_graph();
        prop_assert!(m.is_undirected());
        for v in g.vertices() {
            prop_assert!(g.adjacent(v).is_subset(m.neighbors(v)));
        }
    }

    #[test]
    fn chain_graph_check_matches_kahn_on_directed_graphs(g in directed_graph()) {
        prop_assert_eq!(g.is_chain_graph(), kahn_acyclic(&g));
    }

    #[test]
    fn text_round_trip(g in mixed_graph()) {
        prop_assert_eq!(MixedGraph::parse(&g.to_text()).unwrap(), g);
    }
}
