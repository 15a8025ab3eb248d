//! The latent collider DAG of a covariance graph, and forest checks.

use std::collections::BTreeMap;

use crate::connection::cov_dependent;
use crate::error::{Error, Result};
use crate::graph::{GraphKind, MixedGraph};
use crate::nodeset::{NodeSet, MAX_NODES};
use crate::report::{TripleLine, VerificationReport};
use crate::separation::{canonical_triples, covariance_independent, guard, sep};

pub const LATENT_MAX_NODES: usize = 5;
pub const FOREST_MAX_NODES: usize = 6;

/// A DAG over `V ∪ V'` where each edge `A – B` of the source UG became
/// `A <- L_A_B -> B` for a fresh latent node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentDag {
    pub dag: MixedGraph,
    /// The original nodes, at their original indices.
    pub original: NodeSet,
    /// Source edge `(a, b)` with `a < b` to its latent node.
    pub latents: BTreeMap<(usize, usize), usize>,
}

/// Builds the latent collider DAG. Original nodes keep their indices;
/// latents follow in edge order and are labelled `L_<a>_<b>` with the two
/// endpoint labels sorted.
pub fn latent_dag(graph: &MixedGraph) -> Result<LatentDag> {
    GraphKind::Covariance.check(graph)?;
    let edges = graph.undirected_edges();
    let total = graph.labels().len() + edges.len();
    if total > MAX_NODES {
        return Err(Error::Capacity(total));
    }
    let mut dag =
        MixedGraph::new(graph.labels().iter().cloned())?.induced_subgraph(graph.vertices());
    let mut latents = BTreeMap::new();
    for (a, b) in edges {
        let mut ends = [graph.label(a), graph.label(b)];
        ends.sort();
        let label = format!("L_{}_{}", ends[0], ends[1]);
        if graph.labels().contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let latent = dag.add_node(label)?;
        dag.add_directed(latent, a)?;
        dag.add_directed(latent, b)?;
        latents.insert((a, b), latent);
    }
    Ok(LatentDag {
        dag,
        original: graph.vertices(),
        latents,
    })
}

/// Checks, for every canonical triple over the original nodes, that the
/// covariance criterion on `graph` agrees with c-separation in the latent DAG.
pub fn verify_latent_equivalence(graph: &MixedGraph) -> Result<VerificationReport> {
    guard(graph, "verify_latent_equivalence", LATENT_MAX_NODES)?;
    let latent = latent_dag(graph)?;
    let triples = canonical_triples(graph.vertices());
    let violations = triples
        .iter()
        .filter_map(|t| {
            let covariance = covariance_independent(graph, t);
            let dag = sep(&latent.dag, t.x(), t.y(), t.z());
            (covariance != dag).then(|| {
                TripleLine::new(
                    graph,
                    t,
                    format!("covariance says {covariance}, latent DAG says {dag}"),
                )
            })
        })
        .collect();
    Ok(VerificationReport::new(
        "latent-equivalence",
        triples.len(),
        violations,
    ))
}

/// True iff the UG has no cycle: every component has one edge fewer than nodes.
pub fn is_forest(graph: &MixedGraph) -> bool {
    graph.is_undirected()
        && graph
            .connectivity_components()
            .into_iter()
            .all(|c| graph.induced_subgraph(c).undirected_edge_count() + 1 == c.len())
}

/// On a forest, the dependence criterion is exactly the negation of the
/// independence criterion.
pub fn verify_forest_faithfulness(graph: &MixedGraph) -> Result<VerificationReport> {
    guard(graph, "verify_forest_faithfulness", FOREST_MAX_NODES)?;
    if !is_forest(graph) {
        return Err(Error::NotForest);
    }
    let triples = canonical_triples(graph.vertices());
    let violations = triples
        .iter()
        .filter(|t| cov_dependent(graph, t) == covariance_independent(graph, t))
        .map(|t| {
            TripleLine::new(
                graph,
                t,
                "dependence and independence criteria not complementary",
            )
        })
        .collect();
    Ok(VerificationReport::new(
        "forest-faithfulness",
        triples.len(),
        violations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::CiTriple;

    #[test]
    fn single_edge_latent() {
        let g = MixedGraph::parse("A -- B").unwrap();
        let l = latent_dag(&g).unwrap();
        assert_eq!(l.dag.labels(), ["A", "B", "L_A_B"]);
        assert_eq!(l.dag.directed_edges(), vec![(2, 0), (2, 1)]);
        assert_eq!(l.dag.undirected_edge_count(), 0);
        assert_eq!(l.latents[&(0, 1)], 2);
    }

    #[test]
    fn latent_labels_sort_endpoints() {
        let g = MixedGraph::parse("Z -- A").unwrap();
        let l = latent_dag(&g).unwrap();
        assert_eq!(l.dag.label(2), "L_A_Z");
    }

    #[test]
    fn edgeless_and_cycle_latents() {
        let g = MixedGraph::with_default_labels(3).unwrap();
        let l = latent_dag(&g).unwrap();
        assert_eq!(l.dag.node_count(), 3);
        assert_eq!(l.dag.edge_count(), 0);
        assert!(l.latents.is_empty());

        let c = MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap();
        let l = latent_dag(&c).unwrap();
        assert_eq!(l.dag.node_count(), 8);
        assert_eq!(l.dag.directed_edge_count(), 8);
        assert!(l.dag.is_chain_graph());
    }

    #[test]
    fn label_collision() {
        let g = MixedGraph::parse("A -- B\nnode L_A_B").unwrap();
        assert!(matches!(latent_dag(&g), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn path_equivalence_details() {
        let g = MixedGraph::parse("A -- B\nB -- C").unwrap();
        let l = latent_dag(&g).unwrap();
        let a = NodeSet::singleton(0);
        let c = NodeSet::singleton(2);
        assert!(sep(&l.dag, a, c, NodeSet::EMPTY));
        assert!(!sep(&l.dag, a, c, NodeSet::singleton(1)));
        assert!(covariance_independent(
            &g,
            &CiTriple::pair(0, 2, NodeSet::EMPTY).unwrap()
        ));
        assert!(verify_latent_equivalence(&g).unwrap().passed);
    }

    #[test]
    fn forests() {
        assert!(is_forest(&MixedGraph::parse("A -- B\nB -- C").unwrap()));
        assert!(!is_forest(
            &MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap()
        ));
        assert!(is_forest(&MixedGraph::with_default_labels(4).unwrap()));

        let star = MixedGraph::parse("A -- B\nA -- C\nA -- D").unwrap();
        assert!(verify_forest_faithfulness(&star).unwrap().passed);
        let path5 = MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- E").unwrap();
        assert!(verify_forest_faithfulness(&path5).unwrap().passed);
        let two = MixedGraph::parse("A -- B\nC -- D").unwrap();
        assert!(verify_forest_faithfulness(&two).unwrap().passed);

        let cycle = MixedGraph::parse("A -- B\nB -- C\nC -- A").unwrap();
        assert_eq!(verify_forest_faithfulness(&cycle), Err(Error::NotForest));
    }
}
