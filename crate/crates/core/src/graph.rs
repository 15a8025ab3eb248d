//! Mixed graphs (undirected and directed edges) and the structural
//! primitives the separation criteria are built from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::{NodeSet, MAX_NODES};

/// How an undirected or mixed graph is read as an independence model.
///
/// The tag never alters structure; it only selects the criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// UG read with the "everything else absent" criterion.
    Covariance,
    /// UG read with classic separation.
    Concentration,
    Dag,
    Cg,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Covariance => "covariance",
            GraphKind::Concentration => "concentration",
            GraphKind::Dag => "dag",
            GraphKind::Cg => "cg",
        }
    }

    /// Checks that `graph` has the structure this kind requires.
    pub fn check(self, graph: &MixedGraph) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::KindMismatch {
                kind: self.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            GraphKind::Covariance | GraphKind::Concentration if !graph.is_undirected() => {
                fail("undirected graph expected but directed edges are present")
            }
            GraphKind::Dag if graph.undirected_edge_count() > 0 => {
                fail("DAG expected but undirected edges are present")
            }
            GraphKind::Dag | GraphKind::Cg if !graph.is_chain_graph() => {
                fail("some node is a descendant of itself")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "covariance" | "cov" => Ok(GraphKind::Covariance),
            "concentration" | "conc" => Ok(GraphKind::Concentration),
            "dag" => Ok(GraphKind::Dag),
            "cg" => Ok(GraphKind::Cg),
            other => Err(Error::KindMismatch {
                kind: other.to_string(),
                reason: "unknown graph kind".to_string(),
            }),
        }
    }
}

/// A graph over a finite vertex set with undirected and directed edges.
///
/// Nodes are identified by index; labels are display metadata. A graph may
/// live on a subset of its index space (see [`MixedGraph::induced_subgraph`]),
/// in which case [`MixedGraph::vertices`] is a proper subset of
/// `0..labels().len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGraph {
    labels: Vec<String>,
    vertices: NodeSet,
    neighbors: Vec<NodeSet>,
    children: Vec<NodeSet>,
    parents: Vec<NodeSet>,
}

fn validate_label(label: &str) -> Result<()> {
    let bad = label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '#' | ';'))
        || label.contains("--")
        || label.contains("->");
    if bad {
        Err(Error::InvalidLabel(label.to_string()))
    } else {
        Ok(())
    }
}

/// `A`, `B`, ..., `Z`, then `N26`, `N27`, ...
pub fn default_label(index: usize) -> String {
    if index < 26 {
        ((b'A' + index as u8) as char).to_string()
    } else {
        format!("N{index}")
    }
}

impl MixedGraph {
    /// An edgeless graph over the given labels.
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut graph = MixedGraph::empty();
        for label in labels {
            graph.add_node(label)?;
        }
        Ok(graph)
    }

    /// An edgeless graph on `n` nodes labelled `A`, `B`, ...
    pub fn with_default_labels(n: usize) -> Result<Self> {
        MixedGraph::new((0..n).map(default_label))
    }

    /// A UG over the given labels with edges given by index pairs.
    pub fn undirected<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let mut graph = MixedGraph::new(labels)?;
        for &(a, b) in edges {
            graph.add_undirected(a, b)?;
        }
        Ok(graph)
    }

    fn empty() -> Self {
        MixedGraph {
            labels: Vec::new(),
            vertices: NodeSet::EMPTY,
            neighbors: Vec::new(),
            children: Vec::new(),
            parents: Vec::new(),
        }
    }

    /// Appends a node and returns its index.
    pub fn add_node(&mut self, label: impl Into<String>) -> Result<usize> {
        let label = label.into();
        validate_label(&label)?;
        if self.labels.len() == MAX_NODES {
            return Err(Error::Capacity(MAX_NODES + 1));
        }
        if self.labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let index = self.labels.len();
        self.labels.push(label);
        self.vertices.insert(index);
        self.neighbors.push(NodeSet::EMPTY);
        self.children.push(NodeSet::EMPTY);
        self.parents.push(NodeSet::EMPTY);
        Ok(index)
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        for v in [a, b] {
            if !self.vertices.contains(v) {
                return Err(Error::NotAVertex(v));
            }
        }
        if a == b {
            return Err(Error::SelfLoop(self.labels[a].clone()));
        }
        Ok(())
    }

    fn duplicate(&self, a: usize, b: usize) -> Error {
        Error::DuplicateEdge(self.labels[a].clone(), self.labels[b].clone())
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        if self.adjacent(a).contains(b) {
            return Err(self.duplicate(a, b));
        }
        self.neighbors[a].insert(b);
        self.neighbors[b].insert(a);
        Ok(())
    }

    /// Adds `from -> to`. The opposite arrow may coexist (a directed
    /// 2-cycle, which is not a chain graph); any other second edge between
    /// the pair is rejected.
    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<()> {
        self.check_pair(from, to)?;
        if self.neighbors[from].contains(to) || self.children[from].contains(to) {
            return Err(self.duplicate(from, to));
        }
        self.children[from].insert(to);
        self.parents[to].insert(from);
        Ok(())
    }

    pub fn vertices(&self) -> NodeSet {
        self.vertices
    }

    /// Number of vertices (not the size of the label table).
    pub fn node_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .filter(|&i| self.vertices.contains(i))
    }

    /// Undirected neighbours.
    pub fn neighbors(&self, node: usize) -> NodeSet {
        self.neighbors[node]
    }

    pub fn children(&self, node: usize) -> NodeSet {
        self.children[node]
    }

    pub fn parents(&self, node: usize) -> NodeSet {
        self.parents[node]
    }

    /// Nodes joined to `node` by an edge of any kind or direction.
    pub fn adjacent(&self, node: usize) -> NodeSet {
        self.neighbors[node] | self.children[node] | self.parents[node]
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.vertices
            .iter()
            .flat_map(|a| {
                self.neighbors[a]
                    .iter()
                    .filter(move |&b| a < b)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    /// Directed edges as `(from, to)`, sorted.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        self.vertices
            .iter()
            .flat_map(|a| self.children[a].iter().map(move |b| (a, b)))
            .collect()
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| self.neighbors[v].len())
            .sum::<usize>()
            / 2
    }

    pub fn directed_edge_count(&self) -> usize {
        self.vertices.iter().map(|v| self.children[v].len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.undirected_edge_count() + self.directed_edge_count()
    }

    /// True when there are no directed edges.
    pub fn is_undirected(&self) -> bool {
        self.directed_edge_count() == 0
    }

    /// The subgraph induced by `subset`: vertices `subset ∩ V`, edges with
    /// both endpoints inside, kinds unchanged. Indices and labels are kept.
    pub fn induced_subgraph(&self, subset: NodeSet) -> MixedGraph {
        let keep = subset & self.vertices;
        let restrict = |sets: &[NodeSet]| -> Vec<NodeSet> {
            sets.iter()
                .enumerate()
                .map(|(v, &s)| {
                    if keep.contains(v) {
                        s & keep
                    } else {
                        NodeSet::EMPTY
                    }
                })
                .collect()
        };
        MixedGraph {
            labels: self.labels.clone(),
            vertices: keep,
            neighbors: restrict(&self.neighbors),
            children: restrict(&self.children),
            parents: restrict(&self.parents),
        }
    }

    /// `An(I) ∪ I`: every node with a route into `subset` made of undirected
    /// or forward-directed steps, together with `subset` itself.
    pub fn ancestors(&self, subset: NodeSet) -> NodeSet {
        let mut found = subset & self.vertices;
        let mut frontier = found;
        while let Some(v) = frontier.first() {
            frontier.remove(v);
            let fresh = (self.parents[v] | self.neighbors[v]) - found;
            found |= fresh;
            frontier |= fresh;
        }
        found
    }

    /// Nodes reachable from `start` through undirected edges, staying in `within`.
    fn undirected_closure(&self, start: NodeSet, within: NodeSet) -> NodeSet {
        let mut found = start & within;
        let mut frontier = found;
        while let Some(v) = frontier.first() {
            frontier.remove(v);
            let fresh = (self.neighbors[v] & within) - found;
            found |= fresh;
            frontier |= fresh;
        }
        found
    }

    /// Maximal sets connected by undirected routes, ordered by lowest member.
    /// Nodes without undirected edges form singletons.
    pub fn connectivity_components(&self) -> Vec<NodeSet> {
        let mut rest = self.vertices;
        let mut components = Vec::new();
        while let Some(v) = rest.first() {
            let component = self.undirected_closure(NodeSet::singleton(v), self.vertices);
            rest = rest - component;
            components.push(component);
        }
        components
    }

    /// The moral graph: a UG joining nodes that are adjacent in `self` or
    /// that are both parents of some connectivity component.
    pub fn moral_graph(&self) -> MixedGraph {
        let mut neighbors: Vec<NodeSet> = self
            .labels
            .iter()
            .enumerate()
            .map(|(v, _)| {
                if self.vertices.contains(v) {
                    self.adjacent(v)
                } else {
                    NodeSet::EMPTY
                }
            })
            .collect();
        for component in self.connectivity_components() {
            let parents = component
                .iter()
                .fold(NodeSet::EMPTY, |acc, v| acc | self.parents[v]);
            for p in parents {
                neighbors[p] |= parents - NodeSet::singleton(p);
            }
        }
        let empty = vec![NodeSet::EMPTY; self.labels.len()];
        MixedGraph {
            labels: self.labels.clone(),
            vertices: self.vertices,
            neighbors,
            children: empty.clone(),
            parents: empty,
        }
    }

    /// Nodes reachable from `node` by a route of undirected or forward steps.
    fn forward_reach(&self, start: NodeSet) -> NodeSet {
        let mut found = start;
        let mut frontier = start;
        while let Some(v) = frontier.first() {
            frontier.remove(v);
            let fresh = (self.children[v] | self.neighbors[v]) - found;
            found |= fresh;
            frontier |= fresh;
        }
        found
    }

    /// True iff no node is a descendant of itself, i.e. there is no
    /// semi-directed cycle. Such a cycle exists iff for some arrow `u -> v`
    /// the tail `u` is reachable from `v`.
    pub fn is_chain_graph(&self) -> bool {
        self.directed_edges()
            .into_iter()
            .all(|(u, v)| !self.forward_reach(NodeSet::singleton(v)).contains(u))
    }

    /// Resolves labels to a node set.
    pub fn resolve<S: AsRef<str>>(&self, labels: &[S]) -> Result<NodeSet> {
        let mut set = NodeSet::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let index = self
                .node_index(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            if set.contains(index) {
                return Err(Error::Overlap);
            }
            set.insert(index);
        }
        Ok(set)
    }

    /// Labels of the members of `set`, in index order.
    pub fn set_labels(&self, set: NodeSet) -> Vec<String> {
        set.iter().map(|v| self.labels[v].clone()).collect()
    }

    /// Comma-joined labels; the empty set renders as the empty string.
    pub fn format_set(&self, set: NodeSet) -> String {
        self.set_labels(set).join(",")
    }

    /// Parses the line-oriented graph format: `node <label>`,
    /// `<label> -- <label>`, `<label> -> <label>`, `#` comments.
    pub fn parse(text: &str) -> Result<MixedGraph> {
        let mut graph = MixedGraph::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let at_line = |e: Error| Error::Parse {
                line,
                message: e.to_string(),
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.len() == 2 && tokens[0] == "node" {
                graph.intern(tokens[1]).map_err(at_line)?;
                continue;
            }
            let (left, op, right) = split_edge(content).ok_or_else(|| Error::Parse {
                line,
                message: format!("unrecognised statement {content:?}"),
            })?;
            let a = graph.intern(left).map_err(at_line)?;
            let b = graph.intern(right).map_err(at_line)?;
            match op {
                EdgeOp::Undirected => graph.add_undirected(a, b),
                EdgeOp::Directed => graph.add_directed(a, b),
            }
            .map_err(at_line)?;
        }
        Ok(graph)
    }

    fn intern(&mut self, label: &str) -> Result<usize> {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => Ok(i),
            None => self.add_node(label),
        }
    }

    /// Serializes to the graph file format. Every vertex is declared first so
    /// that node order and isolated nodes survive a round trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.vertices {
            out.push_str(&format!("node {}\n", self.labels[v]));
        }
        for (a, b) in self.undirected_edges() {
            out.push_str(&format!("{} -- {}\n", self.labels[a], self.labels[b]));
        }
        for (a, b) in self.directed_edges() {
            out.push_str(&format!("{} -> {}\n", self.labels[a], self.labels[b]));
        }
        out
    }
}

impl FromStr for MixedGraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MixedGraph::parse(s)
    }
}

enum EdgeOp {
    Undirected,
    Directed,
}

fn split_edge(content: &str) -> Option<(&str, EdgeOp, &str)> {
    let (pos, op) = match (content.find("--"), content.find("->")) {
        (Some(p), None) => (p, EdgeOp::Undirected),
        (None, Some(p)) => (p, EdgeOp::Directed),
        _ => return None,
    };
    let left = content[..pos].trim();
    let right = content[pos + 2..].trim();
    let single = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace);
    (single(left) && single(right)).then_some((left, op, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    fn cycle4() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap()
    }

    #[test]
    fn parse_path() {
        let g = MixedGraph::parse("A -- B\nB -- C").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.labels(), ["A", "B", "C"]);
        assert_eq!(g.undirected_edges(), vec![(0, 1), (1, 2)]);
        assert!(g.is_undirected());
    }

    #[test]
    fn parse_arrow() {
        let g = MixedGraph::parse("A -> B").unwrap();
        assert_eq!(g.directed_edges(), vec![(0, 1)]);
        assert_eq!(g.undirected_edge_count(), 0);
        assert!(GraphKind::Dag.check(&g).is_ok());
    }

    #[test]
    fn parse_declarations_and_comments() {
        let g = MixedGraph::parse("# header\nnode Z\n\nA--B   # trailing\nnode A\n").unwrap();
        assert_eq!(g.labels(), ["Z", "A", "B"]);
        assert_eq!(g.undirected_edges(), vec![(1, 2)]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = MixedGraph::parse("A -- A").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 1, ref message } if message.contains("self-loop"))
        );

        let err = MixedGraph::parse("A -- B\nB -- A").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 2, ref message } if message.contains("duplicate"))
        );

        let err = MixedGraph::parse("A -- B\nA -> B").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = MixedGraph::parse("A -- B\n\nA <- C").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));

        let err = MixedGraph::parse("A B C").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        let many: String = (0..65).map(|i| format!("node n{i}\n")).collect();
        let err = MixedGraph::parse(&many).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 65, ref message } if message.contains("64")));
    }

    #[test]
    fn opposite_arrows_are_representable() {
        let g = MixedGraph::parse("A -> B\nB -> A").unwrap();
        assert_eq!(g.directed_edge_count(), 2);
        assert!(!g.is_chain_graph());
    }

    #[test]
    fn text_round_trip() {
        let g = MixedGraph::parse("node Q\nA -- B\nB -> C").unwrap();
        assert_eq!(MixedGraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn induced_subgraph_of_cycle() {
        let g = cycle4();
        let sub = g.induced_subgraph(set(&[0, 1, 2]));
        assert_eq!(sub.vertices(), set(&[0, 1, 2]));
        assert_eq!(sub.undirected_edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.induced_subgraph(g.vertices()), g);
        let empty = g.induced_subgraph(NodeSet::EMPTY);
        assert_eq!(empty.node_count(), 0);
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn ancestors_examples() {
        let chain = MixedGraph::parse("A -> B\nB -> C").unwrap();
        assert_eq!(chain.ancestors(set(&[2])), set(&[0, 1, 2]));
        assert_eq!(chain.ancestors(set(&[0])), set(&[0]));
        assert_eq!(chain.ancestors(NodeSet::EMPTY), NodeSet::EMPTY);

        let ug = MixedGraph::parse("A -- B\nC -- D\nnode E").unwrap();
        assert_eq!(ug.ancestors(set(&[1])), set(&[0, 1]));
        assert_eq!(ug.ancestors(set(&[1, 4])), set(&[0, 1, 4]));
    }

    #[test]
    fn components_examples() {
        let dag = MixedGraph::parse("A -> B\nB -> C").unwrap();
        assert_eq!(
            dag.connectivity_components(),
            vec![set(&[0]), set(&[1]), set(&[2])]
        );
        assert_eq!(cycle4().connectivity_components(), vec![set(&[0, 1, 2, 3])]);
        let cg = MixedGraph::parse("A -- B\nB -> C").unwrap();
        assert_eq!(cg.connectivity_components(), vec![set(&[0, 1]), set(&[2])]);
    }

    #[test]
    fn moral_graph_examples() {
        let collider = MixedGraph::parse("A -> B\nC -> B").unwrap();
        let m = collider.moral_graph();
        assert!(m.is_undirected());
        assert_eq!(m.undirected_edges(), vec![(0, 1), (0, 2), (1, 2)]);

        let chain = MixedGraph::parse("A -> B\nB -> C").unwrap();
        assert_eq!(chain.moral_graph().undirected_edges(), vec![(0, 1), (1, 2)]);

        assert_eq!(cycle4().moral_graph(), cycle4());

        // parents of a two-node component get married
        let cg = MixedGraph::parse("P -> A\nA -- B\nQ -> B").unwrap();
        let m = cg.moral_graph();
        let p = cg.node_index("P").unwrap();
        let q = cg.node_index("Q").unwrap();
        assert!(m.neighbors(p).contains(q));
    }

    #[test]
    fn chain_graph_examples() {
        assert!(MixedGraph::parse("A -> B\nB -> C")
            .unwrap()
            .is_chain_graph());
        assert!(!MixedGraph::parse("A -> B\nB -> A")
            .unwrap()
            .is_chain_graph());
        assert!(!MixedGraph::parse("A -- B\nB -> C\nC -- A")
            .unwrap()
            .is_chain_graph());
        assert!(MixedGraph::parse("A -- B\nB -> C\nC -- D")
            .unwrap()
            .is_chain_graph());
    }

    #[test]
    fn kind_checks() {
        let dag = MixedGraph::parse("A -> B").unwrap();
        assert!(GraphKind::Covariance.check(&dag).is_err());
        assert!(GraphKind::Cg.check(&dag).is_ok());
        let ug = cycle4();
        assert!(GraphKind::Dag.check(&ug).is_err());
        assert!(GraphKind::Concentration.check(&ug).is_ok());
        assert_eq!(
            "covariance".parse::<GraphKind>().unwrap(),
            GraphKind::Covariance
        );
        assert!("bidirected".parse::<GraphKind>().is_err());
    }

    #[test]
    fn resolve_labels() {
        let g = cycle4();
        assert_eq!(g.resolve(&["A", "C"]).unwrap(), set(&[0, 2]));
        assert!(matches!(g.resolve(&["E"]), Err(Error::UnknownLabel(_))));
        assert!(matches!(g.resolve(&["A", "A"]), Err(Error::Overlap)));
        assert_eq!(g.format_set(set(&[1, 3])), "B,D");
        assert_eq!(g.format_set(NodeSet::EMPTY), "");
    }
}
