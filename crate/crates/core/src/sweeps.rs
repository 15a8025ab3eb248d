//! Verification sweeps over families of small graphs.
//!
//! Each sweep checks one property on every graph of a family and collects
//! the failing graphs. Output order is fixed by the enumeration order, so
//! reports are reproducible for a given configuration.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closure::{verify_completeness, verify_soundness, CLOSURE_MAX_NODES};
use crate::connection::cov_dependent;
use crate::enumerate::{all_labeled_ugs, is_connected, seeded_random_ugs};
use crate::error::{Error, Result};
use crate::gaussian::{
    check_shared_components, concentration_graph_of, count_mismatches, covariance_graph_of,
    derive_seed, sample_markov_gaussian, NdParameterization, DEFAULT_TOLERANCE,
};
use crate::graph::MixedGraph;
use crate::report::{TripleLine, VerificationReport};
use crate::transforms::{
    is_forest, verify_forest_faithfulness, verify_latent_equivalence, LATENT_MAX_NODES,
};

/// Largest size at which the closure sweep enumerates every labelled graph.
pub const EXHAUSTIVE_CLOSURE_NODES: usize = 4;
/// Random graphs drawn per size above [`EXHAUSTIVE_CLOSURE_NODES`].
pub const RANDOM_GRAPHS_PER_SIZE: usize = 200;
/// Largest size for the Gaussian sweeps.
pub const GAUSSIAN_SWEEP_MAX_NODES: usize = 5;
/// Minimum per-graph fraction of fully faithful samples.
pub const FAITHFUL_FRACTION_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Theorems,
    Latent,
    Forest,
    Corollaries,
    All,
}

impl FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorems" => Ok(Scope::Theorems),
            "latent" => Ok(Scope::Latent),
            "forest" => Ok(Scope::Forest),
            "corollaries" => Ok(Scope::Corollaries),
            "all" => Ok(Scope::All),
            other => Err(Error::InvalidLabel(format!("unknown scope {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_max: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_max: 4,
            seed: 0,
            trials: 100,
            tol: DEFAULT_TOLERANCE,
        }
    }
}

/// One graph on which a sweep found a problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFailure {
    /// Edges as `A-B` tokens over the graph's nodes.
    pub graph: String,
    pub nodes: usize,
    pub check: String,
    pub violations: Vec<TripleLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub graphs: usize,
    pub checked: usize,
    pub passed: bool,
    /// Lowest per-graph faithful fraction, for the Gaussian sweep.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_faithful_fraction: Option<f64>,
    pub failures: Vec<GraphFailure>,
}

impl SweepSummary {
    fn new(name: &str) -> Self {
        SweepSummary {
            name: name.to_string(),
            graphs: 0,
            checked: 0,
            passed: true,
            min_faithful_fraction: None,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, graph: &MixedGraph, report: VerificationReport) {
        self.checked += report.checked;
        if !report.passed {
            self.passed = false;
            self.failures.push(GraphFailure {
                graph: edge_string(graph),
                nodes: graph.node_count(),
                check: report.check,
                violations: report.violations,
            });
        }
    }

    fn fail(&mut self, graph: &MixedGraph, check: &str, detail: String) {
        self.passed = false;
        self.failures.push(GraphFailure {
            graph: edge_string(graph),
            nodes: graph.node_count(),
            check: check.to_string(),
            violations: vec![TripleLine {
                x: vec![],
                y: vec![],
                z: vec![],
                status: detail,
            }],
        });
    }

    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "{}: {} ({} graphs, {} checks, {} failing graphs)",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.graphs,
            self.checked,
            self.failures.len()
        );
        if let Some(f) = self.min_faithful_fraction {
            line.push_str(&format!(", min faithful fraction {f:.4}"));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub config: SweepConfig,
    pub passed: bool,
    pub sweeps: Vec<SweepSummary>,
}

/// Edge list rendering used in failure records, e.g. `A-B B-C` or `(none)`.
pub fn edge_string(graph: &MixedGraph) -> String {
    let edges: Vec<String> = graph
        .undirected_edges()
        .into_iter()
        .map(|(a, b)| format!("{}-{}", graph.label(a), graph.label(b)))
        .collect();
    if edges.is_empty() {
        "(none)".to_string()
    } else {
        edges.join(" ")
    }
}

/// Exhaustive graphs up to [`EXHAUSTIVE_CLOSURE_NODES`], seeded random ones above.
fn closure_family(config: &SweepConfig) -> Vec<MixedGraph> {
    let mut graphs = Vec::new();
    for n in 1..=config.n_max {
        if n <= EXHAUSTIVE_CLOSURE_NODES {
            graphs.extend(all_labeled_ugs(n));
        } else {
            graphs.extend(seeded_random_ugs(
                n,
                RANDOM_GRAPHS_PER_SIZE,
                derive_seed(config.seed, n as u64),
            ));
        }
    }
    graphs
}

/// Closure equals the dependence criterion: soundness and completeness.
pub fn sweep_closure_equality(config: &SweepConfig) -> Result<SweepSummary> {
    check_n_max(config.n_max, CLOSURE_MAX_NODES)?;
    let mut summary = SweepSummary::new("closure-equals-criterion");
    for graph in closure_family(config) {
        summary.graphs += 1;
        summary.record(&graph, verify_soundness(&graph)?);
        summary.record(&graph, verify_completeness(&graph)?);
    }
    Ok(summary)
}

pub fn sweep_latent(config: &SweepConfig) -> Result<SweepSummary> {
    let mut summary = SweepSummary::new("latent-dag-equivalence");
    for n in 1..=config.n_max.min(LATENT_MAX_NODES) {
        for graph in all_labeled_ugs(n) {
            summary.graphs += 1;
            summary.record(&graph, verify_latent_equivalence(&graph)?);
        }
    }
    Ok(summary)
}

pub fn sweep_forests(config: &SweepConfig) -> Result<SweepSummary> {
    check_n_max(config.n_max, crate::transforms::FOREST_MAX_NODES)?;
    let mut summary = SweepSummary::new("forest-faithfulness");
    for n in 1..=config.n_max {
        for graph in all_labeled_ugs(n).filter(is_forest) {
            summary.graphs += 1;
            summary.record(&graph, verify_forest_faithfulness(&graph)?);
        }
    }
    Ok(summary)
}

/// Positive definiteness of every sampled covariance and the free parameter
/// count, over all labelled UGs up to `n_max` nodes and `trials` seeds each.
pub fn sweep_gaussian_validity(
    config: &SweepConfig,
    seeds_per_graph: usize,
) -> Result<SweepSummary> {
    check_n_max(config.n_max, crate::gaussian::FAITHFULNESS_MAX_NODES)?;
    let mut summary = SweepSummary::new("gaussian-construction");
    for n in 1..=config.n_max {
        for (index, graph) in all_labeled_ugs(n).enumerate() {
            summary.graphs += 1;
            let nd = NdParameterization::new(&graph);
            if nd.nd_count != 2 * n + graph.undirected_edge_count() {
                summary.fail(&graph, "nd-count", format!("nd count {}", nd.nd_count));
            }
            for t in 0..seeds_per_graph {
                let seed = derive_seed(config.seed, (index * seeds_per_graph + t) as u64);
                summary.checked += 1;
                match sample_markov_gaussian(&graph, seed) {
                    Ok(model) if model.sigma().is_positive_definite() => {
                        if nd.parameters(&model).len() != nd.nd_count {
                            summary.fail(&graph, "nd-count", "parameter vector length".into());
                        }
                    }
                    _ => summary.fail(&graph, "positive-definite", format!("seed {seed}")),
                }
            }
        }
    }
    Ok(summary)
}

/// Shared components, tree-to-complete duality and faithfulness over all
/// connected UGs, `trials` sampled models each.
pub fn sweep_gaussian_duality(config: &SweepConfig) -> Result<SweepSummary> {
    let mut summary = SweepSummary::new("gaussian-duality");
    let mut min_fraction: f64 = 1.0;
    for n in 1..=config.n_max.min(GAUSSIAN_SWEEP_MAX_NODES) {
        for (index, graph) in all_labeled_ugs(n).filter(is_connected).enumerate() {
            summary.graphs += 1;
            let mut faithful = 0;
            let mut component_failures = 0;
            let mut tree_failures = 0;
            for t in 0..config.trials {
                let seed = derive_seed(
                    config.seed ^ ((n as u64) << 32),
                    (index * config.trials + t) as u64,
                );
                let model = sample_markov_gaussian(&graph, seed)?;
                let cov = covariance_graph_of(&model, config.tol)?;
                let conc = concentration_graph_of(&model, config.tol)?;
                let shared = check_shared_components(&cov, &conc);
                if !shared.same_components {
                    component_failures += 1;
                }
                if !shared.trees_map_to_complete {
                    tree_failures += 1;
                }
                let (mismatches, checked) = count_mismatches(&graph, &model, config.tol)?;
                summary.checked += checked;
                if mismatches == 0 {
                    faithful += 1;
                }
            }
            let fraction = faithful as f64 / config.trials.max(1) as f64;
            min_fraction = min_fraction.min(fraction);
            if component_failures > 0 {
                summary.fail(
                    &graph,
                    "shared-components",
                    format!("{component_failures} trials"),
                );
            }
            if tree_failures > 0 {
                summary.fail(
                    &graph,
                    "tree-complete-dual",
                    format!("{tree_failures} trials"),
                );
            }
            if fraction < FAITHFUL_FRACTION_THRESHOLD {
                summary.fail(
                    &graph,
                    "faithfulness",
                    format!("faithful fraction {fraction}"),
                );
            }
        }
    }
    summary.min_faithful_fraction = Some(min_fraction);
    Ok(summary)
}

/// For every dependence the criterion reads off a connected UG, sampled
/// models show a dependent pair in at least the threshold fraction of trials.
pub fn sweep_dependence_certification(config: &SweepConfig) -> Result<SweepSummary> {
    let mut summary = SweepSummary::new("dependence-certification");
    for n in 2..=config.n_max.min(GAUSSIAN_SWEEP_MAX_NODES) {
        for (index, graph) in all_labeled_ugs(n).filter(is_connected).enumerate() {
            summary.graphs += 1;
            let dependencies: Vec<_> = crate::separation::canonical_triples(graph.vertices())
                .into_iter()
                .filter(|t| cov_dependent(&graph, t))
                .collect();
            let mut hits = vec![0usize; dependencies.len()];
            for t in 0..config.trials {
                let seed = derive_seed(
                    config.seed.rotate_left(17) ^ n as u64,
                    (index * config.trials + t) as u64,
                );
                let model = sample_markov_gaussian(&graph, seed)?;
                for (d, triple) in dependencies.iter().enumerate() {
                    let mut found = false;
                    'pairs: for i in triple.x() {
                        for j in triple.y() {
                            if !model.ci_test(i, j, triple.z(), config.tol)? {
                                found = true;
                                break 'pairs;
                            }
                        }
                    }
                    hits[d] += usize::from(found);
                }
            }
            summary.checked += dependencies.len();
            let trials = config.trials.max(1) as f64;
            let weak: Vec<TripleLine> = dependencies
                .iter()
                .zip(&hits)
                .filter(|(_, &h)| (h as f64) / trials < FAITHFUL_FRACTION_THRESHOLD)
                .map(|(t, &h)| {
                    TripleLine::new(
                        &graph,
                        t,
                        format!("{h} of {} trials dependent", config.trials),
                    )
                })
                .collect();
            summary.record(
                &graph,
                VerificationReport::new("dependence-certification", 0, weak),
            );
        }
    }
    Ok(summary)
}

fn check_n_max(n_max: usize, max: usize) -> Result<()> {
    if n_max > max {
        Err(Error::SizeGuard {
            operation: "verify",
            max,
            actual: n_max,
        })
    } else {
        Ok(())
    }
}

/// Runs the sweeps of a scope.
pub fn run_scope(scope: Scope, config: &SweepConfig) -> Result<VerifyReport> {
    check_n_max(config.n_max, CLOSURE_MAX_NODES)?;
    let mut sweeps = Vec::new();
    if matches!(scope, Scope::Theorems | Scope::All) {
        sweeps.push(sweep_closure_equality(config)?);
    }
    if matches!(scope, Scope::Latent | Scope::All) {
        sweeps.push(sweep_latent(config)?);
    }
    if matches!(scope, Scope::Forest | Scope::All) {
        sweeps.push(sweep_forests(config)?);
    }
    if matches!(scope, Scope::Corollaries | Scope::All) {
        let gaussian = SweepConfig {
            n_max: config.n_max.min(GAUSSIAN_SWEEP_MAX_NODES),
            ..*config
        };
        sweeps.push(sweep_gaussian_validity(&gaussian, 3)?);
        sweeps.push(sweep_gaussian_duality(config)?);
        sweeps.push(sweep_dependence_certification(config)?);
    }
    Ok(VerifyReport {
        scope,
        config: *config,
        passed: sweeps.iter().all(|s| s.passed),
        sweeps,
    })
}
