//! Saturation of a covariance graph's dependence base under the
//! contrapositive WTC graphoid rules.
//!
//! Dependence statements are derived from the marginal dependencies of the
//! graph's edges. Independence antecedents are discharged only by the
//! covariance criterion ([`covariance_independent`]); failing to derive a
//! dependence never counts as evidence of independence.
//!
//! The engine materializes every oriented triple over the vertex set as a
//! base-4 code (one digit per vertex: none, X, Y, Z) and runs sweeps over all
//! `(X, Y, Z, W)` splits of the vertices until nothing new appears. Each sweep
//! reads only the statements established before it started, so every stored
//! derivation points at strictly older statements.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::connection::all_dependencies;
use crate::error::{Error, Result};
use crate::graph::{GraphKind, MixedGraph};
use crate::nodeset::NodeSet;
use crate::report::{TripleLine, VerificationReport};
use crate::separation::{covariance_independent, guard, CiTriple};

pub const CLOSURE_MAX_NODES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Base,
    /// Absorbed by canonical storage; never recorded as a derivation.
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction1,
    Contraction2,
    Intersection,
    WeakTransitivity1,
    WeakTransitivity2,
    Composition,
}

impl Rule {
    /// The rules that derive new statements, in default sweep order.
    pub const DERIVING: [Rule; 8] = [
        Rule::Decomposition,
        Rule::WeakUnion,
        Rule::Contraction1,
        Rule::Contraction2,
        Rule::Intersection,
        Rule::WeakTransitivity1,
        Rule::WeakTransitivity2,
        Rule::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Base => "base",
            Rule::Symmetry => "symmetry",
            Rule::Decomposition => "decomposition",
            Rule::WeakUnion => "weak-union",
            Rule::Contraction1 => "contraction1",
            Rule::Contraction2 => "contraction2",
            Rule::Intersection => "intersection",
            Rule::WeakTransitivity1 => "weak-transitivity1",
            Rule::WeakTransitivity2 => "weak-transitivity2",
            Rule::Composition => "composition",
        }
    }

    fn uses_pivot(self) -> bool {
        matches!(self, Rule::WeakTransitivity1 | Rule::WeakTransitivity2)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Oriented statement `(X, Y, Z)`.
type Oriented = (NodeSet, NodeSet, NodeSet);

/// A rule instantiated with concrete sets. For the weak transitivity rules
/// `w` holds the single pivot node `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: Rule,
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
    pub w: NodeSet,
}

/// Antecedents and conclusion of a rule application.
struct Shape {
    dependencies: Vec<Oriented>,
    independencies: Vec<Oriented>,
    conclusion: Oriented,
}

impl RuleApplication {
    fn shape(&self) -> Result<Shape> {
        let RuleApplication { rule, x, y, z, w } = *self;
        let reject = |why: &str| Err(Error::RuleRejected(format!("{rule}: {why}")));
        if x.is_empty() || y.is_empty() || w.is_empty() {
            return reject("X, Y and W (or K) must be non-empty");
        }
        let parts = [x, y, z, w];
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if !parts[i].is_disjoint(parts[j]) {
                    return reject("sets must be pairwise disjoint");
                }
            }
        }
        if rule.uses_pivot() && w.len() != 1 {
            return reject("the pivot K must be a single node");
        }
        let shape = |deps: Vec<Oriented>, inds: Vec<Oriented>, conclusion: Oriented| Shape {
            dependencies: deps,
            independencies: inds,
            conclusion,
        };
        Ok(match rule {
            Rule::Decomposition => shape(vec![(x, y, z)], vec![], (x, y | w, z)),
            Rule::WeakUnion => shape(vec![(x, y, z | w)], vec![], (x, y | w, z)),
            Rule::Contraction1 => shape(vec![(x, y | w, z)], vec![(x, y, z | w)], (x, w, z)),
            Rule::Contraction2 => shape(vec![(x, y | w, z)], vec![(x, w, z)], (x, y, z | w)),
            Rule::Intersection => shape(vec![(x, y | w, z)], vec![(x, y, z | w)], (x, w, z | y)),
            Rule::WeakTransitivity1 => {
                shape(vec![(x, w, z), (w, y, z)], vec![(x, y, z)], (x, y, z | w))
            }
            Rule::WeakTransitivity2 => {
                shape(vec![(x, w, z), (w, y, z)], vec![(x, y, z | w)], (x, y, z))
            }
            Rule::Composition => shape(vec![(x, y | w, z)], vec![(x, y, z)], (x, w, z)),
            Rule::Base | Rule::Symmetry => return reject("not an inference step"),
        })
    }

    pub fn conclusion(&self) -> Result<CiTriple> {
        let (x, y, z) = self.shape()?.conclusion;
        Ok(CiTriple::canonical(x, y, z))
    }

    pub fn dependencies(&self) -> Result<Vec<CiTriple>> {
        Ok(canonicalize(&self.shape()?.dependencies))
    }

    pub fn independencies(&self) -> Result<Vec<CiTriple>> {
        Ok(canonicalize(&self.shape()?.independencies))
    }
}

fn canonicalize(list: &[Oriented]) -> Vec<CiTriple> {
    list.iter()
        .map(|&(x, y, z)| CiTriple::canonical(x, y, z))
        .collect()
}

/// How a statement first entered the closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivation {
    Base,
    Rule(RuleApplication),
}

impl Derivation {
    pub fn rule(&self) -> Rule {
        match self {
            Derivation::Base => Rule::Base,
            Derivation::Rule(app) => app.rule,
        }
    }

    pub fn antecedent_dependencies(&self) -> Vec<CiTriple> {
        match self {
            Derivation::Base => Vec::new(),
            Derivation::Rule(app) => app.dependencies().expect("stored applications are valid"),
        }
    }

    pub fn antecedent_independencies(&self) -> Vec<CiTriple> {
        match self {
            Derivation::Base => Vec::new(),
            Derivation::Rule(app) => app.independencies().expect("stored applications are valid"),
        }
    }
}

/// The saturated closure of a covariance graph's dependence base.
#[derive(Debug, Clone)]
pub struct ClosureState {
    graph: MixedGraph,
    provenance: BTreeMap<CiTriple, Derivation>,
    sweeps: usize,
}

impl ClosureState {
    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    /// Established statements in report order.
    pub fn established(&self) -> impl Iterator<Item = &CiTriple> + '_ {
        self.provenance.keys()
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn contains(&self, triple: &CiTriple) -> bool {
        self.provenance.contains_key(triple)
    }

    pub fn derivation(&self, triple: &CiTriple) -> Option<&Derivation> {
        self.provenance.get(triple)
    }

    /// Number of sweeps run, including the final one that found nothing.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Applies one rule by hand: checks that its dependence antecedents are
    /// established and its independence antecedents hold in the graph, and
    /// returns the conclusion.
    pub fn derive(&self, application: &RuleApplication) -> Result<CiTriple> {
        let shape = application.shape()?;
        let support = shape.dependencies.iter().chain(&shape.independencies).fold(
            shape.conclusion.0 | shape.conclusion.1 | shape.conclusion.2,
            |acc, t| acc | t.0 | t.1 | t.2,
        );
        if let Some(v) = (support - self.graph.vertices()).first() {
            return Err(Error::NotAVertex(v));
        }
        for &(x, y, z) in &shape.dependencies {
            let t = CiTriple::canonical(x, y, z);
            if !self.contains(&t) {
                return Err(Error::RuleRejected(format!(
                    "{}: dependence {} is not established",
                    application.rule,
                    t.display(&self.graph)
                )));
            }
        }
        for &(x, y, z) in &shape.independencies {
            let t = CiTriple::canonical(x, y, z);
            if !covariance_independent(&self.graph, &t) {
                return Err(Error::RuleRejected(format!(
                    "{}: independence {} does not hold in the graph",
                    application.rule,
                    t.display(&self.graph)
                )));
            }
        }
        let (x, y, z) = shape.conclusion;
        Ok(CiTriple::canonical(x, y, z))
    }

    /// One report line per established statement, tagged with its rule.
    pub fn report_lines(&self) -> Vec<TripleLine> {
        self.provenance
            .iter()
            .map(|(t, d)| TripleLine::new(&self.graph, t, d.rule().name()))
            .collect()
    }

    /// The derivation tree of `triple` down to base statements and
    /// graph-certified independencies, one node per line.
    pub fn explain(&self, triple: &CiTriple) -> Result<String> {
        if !self.contains(triple) {
            return Err(Error::NotEstablished(triple.display(&self.graph)));
        }
        let mut out = String::new();
        let mut shown = HashSet::new();
        self.explain_into(triple, 0, &mut shown, &mut out);
        Ok(out)
    }

    fn explain_into(
        &self,
        triple: &CiTriple,
        depth: usize,
        shown: &mut HashSet<CiTriple>,
        out: &mut String,
    ) {
        let indent = "  ".repeat(depth);
        let derivation = self.provenance[triple];
        if !shown.insert(*triple) && derivation != Derivation::Base {
            out.push_str(&format!(
                "{indent}{} ; dependent (derived above)\n",
                triple.display(&self.graph)
            ));
            return;
        }
        out.push_str(&format!(
            "{indent}{} ; dependent by {}\n",
            triple.display(&self.graph),
            derivation.rule()
        ));
        for dep in derivation.antecedent_dependencies() {
            self.explain_into(&dep, depth + 1, shown, out);
        }
        for ind in derivation.antecedent_independencies() {
            out.push_str(&format!(
                "{indent}  {} ; independent in graph\n",
                ind.display(&self.graph)
            ));
        }
    }
}

/// `{({A}, {B}, ∅) : A – B ∈ G}`.
pub fn dependence_base(graph: &MixedGraph) -> Vec<CiTriple> {
    let mut base: Vec<CiTriple> = graph
        .undirected_edges()
        .into_iter()
        .map(|(a, b)| {
            CiTriple::canonical(NodeSet::singleton(a), NodeSet::singleton(b), NodeSet::EMPTY)
        })
        .collect();
    base.sort();
    base
}

/// Dense indexing of oriented triples over a vertex set.
struct Universe {
    nodes: Vec<usize>,
}

impl Universe {
    fn size(&self) -> usize {
        4usize.pow(self.nodes.len() as u32)
    }

    fn encode(&self, (x, y, z): Oriented) -> usize {
        let mut code = 0;
        let mut scale = 1;
        for &v in &self.nodes {
            let digit = if x.contains(v) {
                1
            } else if y.contains(v) {
                2
            } else if z.contains(v) {
                3
            } else {
                0
            };
            code += digit * scale;
            scale *= 4;
        }
        code
    }

    /// All assignments of vertices to `parts` labelled groups plus "unused",
    /// as vectors of `parts` sets.
    fn splits(&self, parts: usize) -> Vec<Vec<NodeSet>> {
        let radix = parts + 1;
        let total = radix.pow(self.nodes.len() as u32);
        (0..total)
            .map(|mut code| {
                let mut sets = vec![NodeSet::EMPTY; parts];
                for &v in &self.nodes {
                    let digit = code % radix;
                    code /= radix;
                    if digit > 0 {
                        sets[digit - 1].insert(v);
                    }
                }
                sets
            })
            .collect()
    }
}

/// Saturates the dependence base of a covariance graph with the default rule order.
pub fn saturate(graph: &MixedGraph) -> Result<ClosureState> {
    saturate_with_rule_order(graph, &Rule::DERIVING)
}

/// Saturates with the rules swept in the given order. The established set
/// does not depend on the order; recorded provenance may.
pub fn saturate_with_rule_order(graph: &MixedGraph, order: &[Rule]) -> Result<ClosureState> {
    guard(graph, "saturate", CLOSURE_MAX_NODES)?;
    GraphKind::Covariance.check(graph)?;

    let universe = Universe {
        nodes: graph.vertices().iter().collect(),
    };
    let size = universe.size();

    let mut independent = vec![false; size];
    for sets in universe.splits(3) {
        let (x, y, z) = (sets[0], sets[1], sets[2]);
        if !x.is_empty() && !y.is_empty() {
            independent[universe.encode((x, y, z))] =
                covariance_independent(graph, &CiTriple::canonical(x, y, z));
        }
    }

    let mut dependent = vec![false; size];
    let mut provenance = BTreeMap::new();
    for t in dependence_base(graph) {
        dependent[universe.encode((t.x(), t.y(), t.z()))] = true;
        dependent[universe.encode((t.y(), t.x(), t.z()))] = true;
        provenance.insert(t, Derivation::Base);
    }

    // (X, Y, Z, W) with X, Y, W non-empty; pivots are split out per rule.
    let quads: Vec<[NodeSet; 4]> = universe
        .splits(4)
        .into_iter()
        .filter(|s| !s[0].is_empty() && !s[1].is_empty() && !s[3].is_empty())
        .map(|s| [s[0], s[1], s[2], s[3]])
        .collect();
    let all = graph.vertices();
    let pivots: Vec<[NodeSet; 4]> = universe
        .splits(3)
        .into_iter()
        .filter(|s| !s[0].is_empty() && !s[1].is_empty())
        .flat_map(|s| {
            let rest = all - s[0] - s[1] - s[2];
            rest.iter()
                .map(move |k| [s[0], s[1], s[2], NodeSet::singleton(k)])
        })
        .collect();

    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut proposed = vec![false; size];
        let mut fresh: Vec<(CiTriple, RuleApplication)> = Vec::new();
        for &rule in order {
            let candidates = if rule.uses_pivot() { &pivots } else { &quads };
            for &[x, y, z, w] in candidates {
                let app = RuleApplication { rule, x, y, z, w };
                let shape = app.shape().expect("enumerated splits are valid");
                let concl = universe.encode(shape.conclusion);
                if dependent[concl] || proposed[concl] {
                    continue;
                }
                let fires = shape
                    .dependencies
                    .iter()
                    .all(|&t| dependent[universe.encode(t)])
                    && shape
                        .independencies
                        .iter()
                        .all(|&t| independent[universe.encode(t)]);
                if fires {
                    let (cx, cy, cz) = shape.conclusion;
                    proposed[concl] = true;
                    proposed[universe.encode((cy, cx, cz))] = true;
                    fresh.push((CiTriple::canonical(cx, cy, cz), app));
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (t, app) in fresh {
            dependent[universe.encode((t.x(), t.y(), t.z()))] = true;
            dependent[universe.encode((t.y(), t.x(), t.z()))] = true;
            provenance.entry(t).or_insert(Derivation::Rule(app));
        }
    }

    Ok(ClosureState {
        graph: graph.clone(),
        provenance,
        sweeps,
    })
}

/// Every statement the covariance dependence criterion reads off the graph
/// is in the closure.
pub fn verify_soundness(graph: &MixedGraph) -> Result<VerificationReport> {
    let state = saturate(graph)?;
    let criterion = all_dependencies(graph, GraphKind::Covariance)?;
    let violations = criterion
        .iter()
        .filter(|t| !state.contains(t))
        .map(|t| TripleLine::new(graph, t, "criterion fires but not in closure"))
        .collect();
    Ok(VerificationReport::new(
        "soundness",
        criterion.len(),
        violations,
    ))
}

/// Every statement in the closure is read off the graph by the covariance
/// dependence criterion.
pub fn verify_completeness(graph: &MixedGraph) -> Result<VerificationReport> {
    let state = saturate(graph)?;
    let criterion: HashSet<CiTriple> = all_dependencies(graph, GraphKind::Covariance)?
        .into_iter()
        .collect();
    let violations = state
        .established()
        .filter(|t| !criterion.contains(t))
        .map(|t| TripleLine::new(graph, t, "in closure but criterion does not fire"))
        .collect();
    Ok(VerificationReport::new(
        "completeness",
        state.len(),
        violations,
    ))
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

    fn path3() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C").unwrap()
    }

    fn cycle4() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap()
    }

    #[test]
    fn dependence_base_sizes() {
        assert_eq!(dependence_base(&cycle4()).len(), 4);
        assert!(dependence_base(&MixedGraph::with_default_labels(3).unwrap()).is_empty());
        let k3 = MixedGraph::parse("A -- B\nA -- C\nB -- C").unwrap();
        assert_eq!(dependence_base(&k3).len(), 3);
    }

    #[test]
    fn single_edge_closure_is_the_base() {
        let g = MixedGraph::parse("A -- B").unwrap();
        let state = saturate(&g).unwrap();
        assert_eq!(
            state.established().copied().collect::<Vec<_>>(),
            vec![t(&[0], &[1], &[])]
        );
        assert_eq!(
            state.derivation(&t(&[0], &[1], &[])),
            Some(&Derivation::Base)
        );
        assert_eq!(state.sweeps(), 1);
    }

    #[test]
    fn path_closure_uses_weak_transitivity() {
        let state = saturate(&path3()).unwrap();
        let target = t(&[0], &[2], &[1]);
        let d = state.derivation(&target).unwrap();
        assert_eq!(d.rule(), Rule::WeakTransitivity1);
        let mut deps = d.antecedent_dependencies();
        deps.sort();
        assert_eq!(deps, vec![t(&[0], &[1], &[]), t(&[1], &[2], &[])]);
        assert_eq!(d.antecedent_independencies(), vec![t(&[0], &[2], &[])]);
    }

    #[test]
    fn cycle_closure_excludes_two_path_case() {
        let state = saturate(&cycle4()).unwrap();
        assert!(state.contains(&t(&[0], &[2], &[1])));
        assert!(!state.contains(&t(&[0], &[2], &[1, 3])));
    }

    #[test]
    fn explain_trees() {
        let state = saturate(&path3()).unwrap();
        let tree = state.explain(&t(&[0], &[2], &[1])).unwrap();
        let mut lines: Vec<&str> = tree.lines().collect();
        assert_eq!(lines[0], "A ; C ; B ; dependent by weak-transitivity1");
        lines[1..].sort();
        assert_eq!(
            lines[1..],
            [
                "  A ; B ;  ; dependent by base",
                "  A ; C ;  ; independent in graph",
                "  B ; C ;  ; dependent by base",
            ]
        );
        let base = state.explain(&t(&[0], &[1], &[])).unwrap();
        assert_eq!(base, "A ; B ;  ; dependent by base\n");
        assert!(matches!(
            state.explain(&t(&[0], &[2], &[])),
            Err(Error::NotEstablished(_))
        ));
    }

    #[test]
    fn manual_derivation() {
        let state = saturate(&path3()).unwrap();
        let app = RuleApplication {
            rule: Rule::WeakTransitivity1,
            x: s(&[0]),
            y: s(&[2]),
            z: NodeSet::EMPTY,
            w: s(&[1]),
        };
        assert_eq!(state.derive(&app).unwrap(), t(&[0], &[2], &[1]));
        // needs A ⊥ B, which the graph does not certify
        let bad = RuleApplication {
            rule: Rule::Composition,
            x: s(&[0]),
            y: s(&[1]),
            z: NodeSet::EMPTY,
            w: s(&[2]),
        };
        assert!(matches!(state.derive(&bad), Err(Error::RuleRejected(_))));
        let overlapping = RuleApplication { w: s(&[0]), ..app };
        assert!(state.derive(&overlapping).is_err());
    }

    #[test]
    fn size_guard_and_kind() {
        let big = MixedGraph::with_default_labels(7).unwrap();
        assert!(matches!(saturate(&big), Err(Error::SizeGuard { .. })));
        let dag = MixedGraph::parse("A -> B").unwrap();
        assert!(saturate(&dag).is_err());
    }

    #[test]
    fn verification_examples() {
        for g in [
            path3(),
            cycle4(),
            MixedGraph::with_default_labels(3).unwrap(),
        ] {
            assert!(verify_soundness(&g).unwrap().passed);
            assert!(verify_completeness(&g).unwrap().passed);
        }
    }
}
