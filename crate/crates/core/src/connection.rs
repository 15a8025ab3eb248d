//! Dependence criteria built on the single-path connection statement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphKind, MixedGraph};
use crate::nodeset::NodeSet;
use crate::separation::{canonical_triples, guard, CiTriple, ENUMERATION_MAX_NODES};

/// A simple path, listed from the first endpoint to the second.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathWitness {
    pub nodes: Vec<usize>,
}

impl PathWitness {
    pub fn endpoints(&self) -> (usize, usize) {
        (
            self.nodes[0],
            *self.nodes.last().expect("paths are non-empty"),
        )
    }

    /// Labels joined with `-`.
    pub fn display(&self, graph: &MixedGraph) -> String {
        self.nodes
            .iter()
            .map(|&v| graph.label(v))
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Result of a capped simple-path count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCount {
    /// Number of paths found, saturating at the cap.
    pub count: usize,
    pub witnesses: Vec<PathWitness>,
}

/// Counts simple paths from `a` to `b` in the undirected part of `graph`
/// that only use nodes of `allowed`, stopping once `cap` are found.
pub fn count_paths_within(
    graph: &MixedGraph,
    a: usize,
    b: usize,
    allowed: NodeSet,
    cap: usize,
) -> PathCount {
    let mut found = PathCount {
        count: 0,
        witnesses: Vec::new(),
    };
    let allowed = allowed & graph.vertices();
    if cap == 0 || a == b || !allowed.contains(a) || !allowed.contains(b) {
        return found;
    }
    let mut stack = vec![a];
    walk(
        graph,
        b,
        allowed,
        NodeSet::singleton(a),
        &mut stack,
        cap,
        &mut found,
    );
    found
}

fn walk(
    graph: &MixedGraph,
    target: usize,
    allowed: NodeSet,
    visited: NodeSet,
    stack: &mut Vec<usize>,
    cap: usize,
    found: &mut PathCount,
) {
    let here = *stack.last().expect("stack holds the current path");
    for next in (graph.neighbors(here) & allowed) - visited {
        if found.count >= cap {
            return;
        }
        stack.push(next);
        if next == target {
            found.count += 1;
            found.witnesses.push(PathWitness {
                nodes: stack.clone(),
            });
        } else {
            walk(
                graph,
                target,
                allowed,
                visited | NodeSet::singleton(next),
                stack,
                cap,
                found,
            );
        }
        stack.pop();
    }
}

/// For some `A ∈ X`, `B ∈ Y`, the unique simple path between them using only
/// `{A, B} ∪ allowed_extra(A, B)`.
fn unique_path(
    graph: &MixedGraph,
    triple: &CiTriple,
    allowed: impl Fn(usize, usize) -> NodeSet,
) -> Option<PathWitness> {
    for a in triple.x() {
        for b in triple.y() {
            let mut counted = count_paths_within(graph, a, b, allowed(a, b), 2);
            if counted.count == 1 {
                return counted.witnesses.pop();
            }
        }
    }
    None
}

/// `con_G(X, Y | Z)` with the witnessing path.
pub fn con_witness(graph: &MixedGraph, triple: &CiTriple) -> Option<PathWitness> {
    let support = triple.support();
    let vertices = graph.vertices();
    unique_path(graph, triple, |a, b| {
        vertices - (support - NodeSet::singleton(a) - NodeSet::singleton(b))
    })
}

/// `con_G(X, Y | Z)`: some `A ∈ X`, `B ∈ Y` are joined by exactly one simple
/// path whose nodes avoid `XYZ ∖ AB`.
pub fn con(graph: &MixedGraph, triple: &CiTriple) -> bool {
    con_witness(graph, triple).is_some()
}

/// Covariance dependence with its witness: a unique simple path between some
/// `A ∈ X`, `B ∈ Y` whose nodes all lie in `ABZ`.
pub fn cov_dependent_witness(graph: &MixedGraph, triple: &CiTriple) -> Option<PathWitness> {
    let z = triple.z();
    unique_path(graph, triple, |a, b| {
        z | NodeSet::singleton(a) | NodeSet::singleton(b)
    })
}

pub fn cov_dependent(graph: &MixedGraph, triple: &CiTriple) -> bool {
    cov_dependent_witness(graph, triple).is_some()
}

/// Concentration dependence: `con_G(X, Y | Z)`.
pub fn conc_dependent(graph: &MixedGraph, triple: &CiTriple) -> bool {
    con(graph, triple)
}

/// The kind-appropriate dependence criterion with its witness path.
///
/// Only defined for undirected graphs.
pub fn dependence_witness(
    graph: &MixedGraph,
    kind: GraphKind,
    triple: &CiTriple,
) -> Result<Option<PathWitness>> {
    check_ug_kind(graph, kind)?;
    triple.check_within(graph)?;
    Ok(match kind {
        GraphKind::Covariance => cov_dependent_witness(graph, triple),
        _ => con_witness(graph, triple),
    })
}

pub fn ci_dependent(graph: &MixedGraph, kind: GraphKind, triple: &CiTriple) -> Result<bool> {
    Ok(dependence_witness(graph, kind, triple)?.is_some())
}

fn check_ug_kind(graph: &MixedGraph, kind: GraphKind) -> Result<()> {
    match kind {
        GraphKind::Covariance | GraphKind::Concentration => kind.check(graph),
        other => Err(Error::KindMismatch {
            kind: other.to_string(),
            reason: "dependence criteria are defined for covariance and concentration graphs only"
                .to_string(),
        }),
    }
}

/// Every canonical triple the dependence criterion fires on, in report order.
pub fn all_dependencies(graph: &MixedGraph, kind: GraphKind) -> Result<Vec<CiTriple>> {
    guard(graph, "all_dependencies", ENUMERATION_MAX_NODES)?;
    check_ug_kind(graph, kind)?;
    Ok(canonical_triples(graph.vertices())
        .into_iter()
        .filter(|t| match kind {
            GraphKind::Covariance => cov_dependent(graph, t),
            _ => conc_dependent(graph, t),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    fn t(x: &[usize], y: &[usize], z: &[usize]) -> CiTriple {
        CiTriple::new(s(x), s(y), s(z)).unwrap()
    }

    fn cycle4() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap()
    }

    fn path3() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C").unwrap()
    }

    fn triangle() -> MixedGraph {
        MixedGraph::parse("A -- B\nA -- C\nB -- C").unwrap()
    }

    #[test]
    fn counting_on_cycle() {
        let g = cycle4();
        let one = count_paths_within(&g, 0, 2, s(&[0, 1, 2]), 2);
        assert_eq!(one.count, 1);
        assert_eq!(one.witnesses[0].nodes, vec![0, 1, 2]);
        assert_eq!(count_paths_within(&g, 0, 2, s(&[0, 1, 2, 3]), 2).count, 2);
        assert_eq!(count_paths_within(&g, 0, 2, s(&[0, 1, 2, 3]), 1).count, 1);
        let edgeless = MixedGraph::with_default_labels(2).unwrap();
        assert_eq!(count_paths_within(&edgeless, 0, 1, s(&[0, 1]), 2).count, 0);
    }

    #[test]
    fn con_examples() {
        assert!(con(&path3(), &t(&[0], &[2], &[])));
        assert!(con(&triangle(), &t(&[0], &[2], &[1])));
        let apart = MixedGraph::with_default_labels(2).unwrap();
        assert!(!con(&apart, &t(&[0], &[1], &[])));
    }

    #[test]
    fn cov_dependent_examples() {
        let g = cycle4();
        let w = cov_dependent_witness(&g, &t(&[0], &[2], &[1])).unwrap();
        assert_eq!(w.display(&g), "A-B-C");
        assert!(cov_dependent(&g, &t(&[0], &[2], &[3])));
        assert!(!cov_dependent(&g, &t(&[0], &[2], &[1, 3])));
        for (a, b) in g.undirected_edges() {
            assert!(cov_dependent(
                &g,
                &CiTriple::pair(a, b, NodeSet::EMPTY).unwrap()
            ));
        }
        let tri = triangle();
        assert!(!cov_dependent(&tri, &t(&[0], &[2], &[1])));
        assert!(cov_dependent(&tri, &t(&[0], &[2], &[])));
    }

    #[test]
    fn conc_dependent_examples() {
        assert!(!conc_dependent(&path3(), &t(&[0], &[2], &[1])));
        assert!(conc_dependent(&path3(), &t(&[0], &[2], &[])));
        assert!(conc_dependent(&triangle(), &t(&[0], &[1], &[2])));
        let apart = MixedGraph::with_default_labels(2).unwrap();
        assert!(!conc_dependent(&apart, &t(&[0], &[1], &[])));
    }

    #[test]
    fn all_dependencies_examples() {
        let edge = MixedGraph::parse("A -- B").unwrap();
        assert_eq!(
            all_dependencies(&edge, GraphKind::Covariance).unwrap(),
            vec![t(&[0], &[1], &[])]
        );
        let dep = all_dependencies(&path3(), GraphKind::Covariance).unwrap();
        assert!(dep.contains(&t(&[0], &[2], &[1])));
        assert!(dep.contains(&t(&[0], &[1], &[])));
        let dep = all_dependencies(&cycle4(), GraphKind::Covariance).unwrap();
        assert!(!dep.contains(&t(&[0], &[2], &[1, 3])));
    }

    #[test]
    fn not_monotone_in_conditioning_set() {
        let g = cycle4();
        assert!(cov_dependent(&g, &t(&[0], &[2], &[1])));
        assert!(!cov_dependent(&g, &t(&[0], &[2], &[1, 3])));
    }

    #[test]
    fn rejects_directed_input() {
        let dag = MixedGraph::parse("A -> B").unwrap();
        assert!(ci_dependent(&dag, GraphKind::Covariance, &t(&[0], &[1], &[])).is_err());
        assert!(ci_dependent(&dag, GraphKind::Dag, &t(&[0], &[1], &[])).is_err());
    }
}
