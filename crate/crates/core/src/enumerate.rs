//! Small-graph generators for exhaustive and randomized sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::MixedGraph;

/// All `n(n-1)/2` index pairs in lexicographic order.
pub fn node_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

/// Every labelled UG on `n` nodes (labels `A`, `B`, ...), one per edge
/// subset, in subset order. There are `2^(n(n-1)/2)` of them.
pub fn all_labeled_ugs(n: usize) -> impl Iterator<Item = MixedGraph> {
    let pairs = node_pairs(n);
    assert!(pairs.len() < 32, "too many graphs to enumerate");
    let base = MixedGraph::with_default_labels(n).expect("n is small");
    (0u32..1 << pairs.len()).map(move |mask| {
        let mut g = base.clone();
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                g.add_undirected(a, b).expect("fresh pair");
            }
        }
        g
    })
}

/// A UG on `n` nodes with each edge present independently with probability
/// `density`.
pub fn random_ug<R: Rng>(n: usize, density: f64, rng: &mut R) -> MixedGraph {
    let mut g = MixedGraph::with_default_labels(n).expect("n is small");
    for (a, b) in node_pairs(n) {
        if rng.random_bool(density) {
            g.add_undirected(a, b).expect("fresh pair");
        }
    }
    g
}

/// `count` seeded random UGs on `n` nodes at density one half.
pub fn seeded_random_ugs(n: usize, count: usize, seed: u64) -> Vec<MixedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_ug(n, 0.5, &mut rng)).collect()
}

pub fn is_connected(graph: &MixedGraph) -> bool {
    graph.connectivity_components().len() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::is_forest;

    #[test]
    fn counts() {
        assert_eq!(all_labeled_ugs(4).count(), 64);
        assert_eq!(all_labeled_ugs(1).count(), 1);
        // connected labelled graphs on 4 nodes: 38
        assert_eq!(all_labeled_ugs(4).filter(is_connected).count(), 38);
        // labelled forests on 4 nodes: 38; trees (Cayley): 16
        assert_eq!(all_labeled_ugs(4).filter(is_forest).count(), 38);
        assert_eq!(
            all_labeled_ugs(4)
                .filter(|g| is_forest(g) && is_connected(g))
                .count(),
            16
        );
    }

    #[test]
    fn seeded_graphs_repeat() {
        assert_eq!(seeded_random_ugs(5, 10, 9), seeded_random_ugs(5, 10, 9));
        assert_ne!(seeded_random_ugs(5, 10, 9), seeded_random_ugs(5, 10, 10));
    }
}
