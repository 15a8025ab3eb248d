//! Independence criteria: c-separation for chain graphs and its dual
//! reading of undirected graphs as covariance graphs.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphKind, MixedGraph};
use crate::nodeset::NodeSet;

/// Largest vertex count accepted by the exhaustive enumerators.
pub const ENUMERATION_MAX_NODES: usize = 8;

/// A statement "X is (in)dependent of Y given Z" over pairwise disjoint
/// sets with X and Y non-empty.
///
/// Construction normalizes symmetry away: the side with the smaller bit
/// pattern is always stored as `x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CiTriple {
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
}

impl CiTriple {
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptySide);
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return Err(Error::Overlap);
        }
        Ok(CiTriple::canonical(x, y, z))
    }

    /// Caller guarantees validity.
    pub(crate) fn canonical(x: NodeSet, y: NodeSet, z: NodeSet) -> Self {
        debug_assert!(!x.is_empty() && !y.is_empty());
        debug_assert!(x.is_disjoint(y) && (x | y).is_disjoint(z));
        if x.bits() <= y.bits() {
            CiTriple { x, y, z }
        } else {
            CiTriple { x: y, y: x, z }
        }
    }

    /// Shorthand for singletons-and-set queries: `({a}, {b}, z)`.
    pub fn pair(a: usize, b: usize, z: NodeSet) -> Result<Self> {
        CiTriple::new(NodeSet::singleton(a), NodeSet::singleton(b), z)
    }

    pub fn x(&self) -> NodeSet {
        self.x
    }

    pub fn y(&self) -> NodeSet {
        self.y
    }

    pub fn z(&self) -> NodeSet {
        self.z
    }

    /// `X ∪ Y ∪ Z`.
    pub fn support(&self) -> NodeSet {
        self.x | self.y | self.z
    }

    pub fn check_within(&self, graph: &MixedGraph) -> Result<()> {
        match (self.support() - graph.vertices()).first() {
            Some(v) => Err(Error::NotAVertex(v)),
            None => Ok(()),
        }
    }

    /// Renders as `X ; Y ; Z` with comma-joined labels.
    pub fn display(&self, graph: &MixedGraph) -> String {
        format!(
            "{} ; {} ; {}",
            graph.format_set(self.x),
            graph.format_set(self.y),
            graph.format_set(self.z)
        )
    }

    fn order_key(&self) -> (usize, u64, u64, u64) {
        (
            self.support().len(),
            self.x.bits(),
            self.y.bits(),
            self.z.bits(),
        )
    }
}

impl Ord for CiTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for CiTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CiTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} ; {:?} | {:?})", self.x, self.y, self.z)
    }
}

/// All canonical triples over `vertices`, in report order.
pub fn canonical_triples(vertices: NodeSet) -> Vec<CiTriple> {
    let nodes: Vec<usize> = vertices.iter().collect();
    let total = 4usize.pow(nodes.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let (mut x, mut y, mut z) = (NodeSet::EMPTY, NodeSet::EMPTY, NodeSet::EMPTY);
        let mut rest = code;
        for &v in &nodes {
            match rest % 4 {
                1 => x.insert(v),
                2 => y.insert(v),
                3 => z.insert(v),
                _ => {}
            }
            rest /= 4;
        }
        if !x.is_empty() && !y.is_empty() && x.bits() < y.bits() {
            out.push(CiTriple { x, y, z });
        }
    }
    out.sort();
    out
}

pub(crate) fn guard(graph: &MixedGraph, operation: &'static str, max: usize) -> Result<()> {
    if graph.node_count() > max {
        Err(Error::SizeGuard {
            operation,
            max,
            actual: graph.node_count(),
        })
    } else {
        Ok(())
    }
}

/// Nodes reachable from `start` in `graph` (any edge, either direction)
/// without entering `blocked`.
fn reach_avoiding(graph: &MixedGraph, start: NodeSet, blocked: NodeSet) -> NodeSet {
    let allowed = graph.vertices() - blocked;
    let mut found = start & allowed;
    let mut frontier = found;
    while let Some(v) = frontier.first() {
        frontier.remove(v);
        let fresh = (graph.adjacent(v) & allowed) - found;
        found |= fresh;
        frontier |= fresh;
    }
    found
}

/// `sep_G(X, Y | Z)`: every path from X to Y in the moral graph of the
/// subgraph induced by `An(XYZ)` has some node in Z.
///
/// Decided as reachability with Z deleted.
pub fn sep(graph: &MixedGraph, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    let ancestral = graph.ancestors(x | y | z);
    let moral = graph.induced_subgraph(ancestral).moral_graph();
    reach_avoiding(&moral, x, z).is_disjoint(y)
}

/// Plain UG separation: every X–Y path hits `blocked`.
pub fn ug_separated(graph: &MixedGraph, x: NodeSet, y: NodeSet, blocked: NodeSet) -> bool {
    reach_avoiding(graph, x, blocked).is_disjoint(y)
}

/// Covariance-graph independence: every path from X to Y has a node
/// outside XYZ. Equivalently X and Y are disconnected in `G[XYZ]`.
pub fn covariance_independent(graph: &MixedGraph, triple: &CiTriple) -> bool {
    let outside = graph.vertices() - triple.support();
    ug_separated(graph, triple.x, triple.y, outside)
}

/// Concentration-graph independence: every X–Y path hits Z.
pub fn concentration_independent(graph: &MixedGraph, triple: &CiTriple) -> bool {
    ug_separated(graph, triple.x, triple.y, triple.z)
}

/// The kind-appropriate independence criterion.
pub fn ci_independent(graph: &MixedGraph, kind: GraphKind, triple: &CiTriple) -> Result<bool> {
    kind.check(graph)?;
    triple.check_within(graph)?;
    Ok(match kind {
        GraphKind::Covariance => covariance_independent(graph, triple),
        GraphKind::Concentration => concentration_independent(graph, triple),
        GraphKind::Dag | GraphKind::Cg => sep(graph, triple.x, triple.y, triple.z),
    })
}

/// Every canonical triple the criterion declares independent, in report order.
pub fn all_independencies(graph: &MixedGraph, kind: GraphKind) -> Result<Vec<CiTriple>> {
    guard(graph, "all_independencies", ENUMERATION_MAX_NODES)?;
    kind.check(graph)?;
    Ok(canonical_triples(graph.vertices())
        .into_iter()
        .filter(|t| match kind {
            GraphKind::Covariance => covariance_independent(graph, t),
            GraphKind::Concentration => concentration_independent(graph, t),
            GraphKind::Dag | GraphKind::Cg => sep(graph, t.x, t.y, t.z),
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

    #[test]
    fn triple_validation() {
        assert_eq!(
            CiTriple::new(s(&[0]), NodeSet::EMPTY, s(&[])),
            Err(Error::EmptySide)
        );
        assert_eq!(CiTriple::new(s(&[0]), s(&[0]), s(&[])), Err(Error::Overlap));
        assert_eq!(
            CiTriple::new(s(&[0]), s(&[1]), s(&[1])),
            Err(Error::Overlap)
        );
        let a = t(&[2], &[0], &[1]);
        assert_eq!(a.x(), s(&[0]));
        assert_eq!(a, t(&[0], &[2], &[1]));
    }

    #[test]
    fn canonical_triple_counts() {
        // (4^n - 2*3^n + 2^n) / 2 ordered-then-halved triples
        for n in 0..6usize {
            let expect =
                (4usize.pow(n as u32) + 2usize.pow(n as u32) - 2 * 3usize.pow(n as u32)) / 2;
            assert_eq!(canonical_triples(NodeSet::full(n)).len(), expect);
        }
        let all = canonical_triples(NodeSet::full(4));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sep_on_dags() {
        let chain = MixedGraph::parse("A -> B\nB -> C").unwrap();
        assert!(sep(&chain, s(&[0]), s(&[2]), s(&[1])));
        assert!(!sep(&chain, s(&[0]), s(&[2]), s(&[])));

        let collider = MixedGraph::parse("A -> B\nC -> B").unwrap();
        assert!(sep(&collider, s(&[0]), s(&[2]), s(&[])));
        assert!(!sep(&collider, s(&[0]), s(&[2]), s(&[1])));

        let apart = MixedGraph::parse("A -> B\nC -> D").unwrap();
        assert!(sep(&apart, s(&[0]), s(&[2]), s(&[])));
    }

    #[test]
    fn covariance_reading_of_cycle() {
        let g = cycle4();
        let k = GraphKind::Covariance;
        assert!(ci_independent(&g, k, &t(&[0], &[2], &[])).unwrap());
        assert!(!ci_independent(&g, k, &t(&[0], &[2], &[1])).unwrap());
        assert!(ci_independent(&g, k, &t(&[1], &[3], &[])).unwrap());
        assert!(!ci_independent(&g, k, &t(&[0], &[2], &[1, 3])).unwrap());
    }

    #[test]
    fn edgeless_is_all_independent() {
        let g = MixedGraph::with_default_labels(4).unwrap();
        let all = canonical_triples(g.vertices());
        assert_eq!(all_independencies(&g, GraphKind::Covariance).unwrap(), all);
    }

    #[test]
    fn all_independencies_examples() {
        let edge = MixedGraph::parse("A -- B").unwrap();
        assert!(all_independencies(&edge, GraphKind::Covariance)
            .unwrap()
            .is_empty());

        let path = MixedGraph::parse("A -- B\nB -- C").unwrap();
        let ind = all_independencies(&path, GraphKind::Covariance).unwrap();
        assert!(ind.contains(&t(&[0], &[2], &[])));

        let g = cycle4();
        let marginal: Vec<_> = all_independencies(&g, GraphKind::Covariance)
            .unwrap()
            .into_iter()
            .filter(|t| t.z().is_empty() && t.x().len() == 1 && t.y().len() == 1)
            .collect();
        assert_eq!(marginal, vec![t(&[0], &[2], &[]), t(&[1], &[3], &[])]);
    }

    #[test]
    fn wrong_kind_and_foreign_nodes() {
        let dag = MixedGraph::parse("A -> B").unwrap();
        assert!(ci_independent(&dag, GraphKind::Covariance, &t(&[0], &[1], &[])).is_err());
        let g = cycle4();
        assert_eq!(
            ci_independent(&g, GraphKind::Covariance, &t(&[0], &[5], &[])),
            Err(Error::NotAVertex(5))
        );
        let big = MixedGraph::with_default_labels(9).unwrap();
        assert!(matches!(
            all_independencies(&big, GraphKind::Covariance),
            Err(Error::SizeGuard { .. })
        ));
    }
}
