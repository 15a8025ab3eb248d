//! Regular Gaussian models that are Markov with respect to a covariance
//! graph, and a determinant-based conditional independence oracle.
//!
//! Models are drawn from a strictly diagonally dominant box of the free
//! parameters: diagonal entries above `N - 1`, edge covariances in `[-1, 1]`
//! and structural zeros elsewhere. Every such matrix is positive definite.
//! `i ⊥ j | K` holds in a regular Gaussian iff `det(Σ[iK, jK]) = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphKind, MixedGraph};
use crate::linalg::{determinant, SquareMatrix};
use crate::nodeset::NodeSet;
use crate::separation::{covariance_independent, guard, CiTriple};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const FAITHFULNESS_MAX_NODES: usize = 6;

/// Offset above `N - 1` where the diagonal sampling window starts.
const DIAGONAL_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    labels: Vec<String>,
    mean: Vec<f64>,
    sigma: SquareMatrix,
}

impl GaussianModel {
    /// Validates symmetry and positive definiteness.
    pub fn new(labels: Vec<String>, mean: Vec<f64>, sigma: SquareMatrix) -> Result<Self> {
        let n = sigma.dim();
        if labels.len() != n || mean.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "{} labels and {} means for a {n}x{n} covariance",
                labels.len(),
                mean.len()
            )));
        }
        if !sigma.is_symmetric() {
            return Err(Error::InvalidMatrix("covariance is not symmetric".into()));
        }
        if sigma.cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(GaussianModel {
            labels,
            mean,
            sigma,
        })
    }

    /// Zero mean, default labels.
    pub fn from_covariance(sigma: SquareMatrix) -> Result<Self> {
        let n = sigma.dim();
        let labels = (0..n).map(crate::graph::default_label).collect();
        GaussianModel::new(labels, vec![0.0; n], sigma)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> &SquareMatrix {
        &self.sigma
    }

    /// Like [`ci_test`] as a method.
    pub fn ci_test(&self, i: usize, j: usize, given: NodeSet, tol: f64) -> Result<bool> {
        ci_test(self, i, j, given, tol)
    }
}

/// The free parameters of the Gaussian models Markov with respect to a
/// covariance graph: means, variances and one covariance per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdParameterization {
    pub graph: MixedGraph,
    pub nd_count: usize,
}

impl NdParameterization {
    pub fn new(graph: &MixedGraph) -> Self {
        NdParameterization {
            graph: graph.clone(),
            nd_count: 2 * graph.node_count() + graph.undirected_edge_count(),
        }
    }

    /// The free parameter vector of `model`: means, then the diagonal, then
    /// edge covariances in edge order.
    pub fn parameters(&self, model: &GaussianModel) -> Vec<f64> {
        let mut out = model.mean.clone();
        out.extend((0..model.dim()).map(|i| model.sigma.get(i, i)));
        out.extend(
            self.graph
                .undirected_edges()
                .into_iter()
                .map(|(a, b)| model.sigma.get(a, b)),
        );
        out
    }
}

/// Relabels a graph so its vertices are exactly `0..node_count`.
fn compact(graph: &MixedGraph) -> MixedGraph {
    if graph.vertices() == NodeSet::full(graph.labels().len()) {
        graph.clone()
    } else {
        MixedGraph::parse(&graph.to_text()).expect("serialized graphs reparse")
    }
}

/// Draws a model from the diagonally dominant parameter box of `graph`.
///
/// Deterministic in `seed` (ChaCha8). Draw order: means, diagonal, then edge
/// covariances in edge order. Graphs living on a subset of their index space
/// are compacted first.
pub fn sample_markov_gaussian(graph: &MixedGraph, seed: u64) -> Result<GaussianModel> {
    GraphKind::Covariance.check(graph)?;
    let graph = compact(graph);
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let low = n.saturating_sub(1) as f64 + DIAGONAL_MARGIN;
    let mut sigma = SquareMatrix::zeros(n);
    for i in 0..n {
        sigma.set(i, i, rng.random_range(low..low + 1.0));
    }
    for (a, b) in graph.undirected_edges() {
        let value = rng.random_range(-1.0..=1.0);
        sigma.set(a, b, value);
        sigma.set(b, a, value);
    }
    GaussianModel::new(graph.labels().to_vec(), mean, sigma)
}

/// `i ⊥ j | K` by vanishing of `det(Σ[iK, jK])`, relative to the product of
/// the largest absolute entry of each row of that submatrix.
pub fn ci_test(
    model: &GaussianModel,
    i: usize,
    j: usize,
    given: NodeSet,
    tol: f64,
) -> Result<bool> {
    let n = model.dim();
    for v in [i, j].into_iter().chain(given) {
        if v >= n {
            return Err(Error::NotAVertex(v));
        }
    }
    if i == j || given.contains(i) || given.contains(j) {
        return Err(Error::Overlap);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidMatrix("tolerance must be positive".into()));
    }
    let k: Vec<usize> = given.iter().collect();
    let mut all = vec![i, j];
    all.extend(&k);
    let joint = determinant(&model.sigma.select(&all, &all));
    if joint.is_nan() || joint <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let rows: Vec<usize> = std::iter::once(i).chain(k.iter().copied()).collect();
    let cols: Vec<usize> = std::iter::once(j).chain(k.iter().copied()).collect();
    let sub = model.sigma.select(&rows, &cols);
    let scale: f64 = sub
        .iter()
        .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .product();
    Ok(determinant(&sub).abs() <= tol * scale)
}

fn graph_from_model(
    model: &GaussianModel,
    dependent: impl Fn(usize, usize) -> Result<bool>,
) -> Result<MixedGraph> {
    let mut graph = MixedGraph::new(model.labels.iter().cloned())?;
    let n = model.dim();
    for a in 0..n {
        for b in a + 1..n {
            if dependent(a, b)? {
                graph.add_undirected(a, b)?;
            }
        }
    }
    Ok(graph)
}

/// Edge `i – j` iff `i` and `j` are marginally dependent.
pub fn covariance_graph_of(model: &GaussianModel, tol: f64) -> Result<MixedGraph> {
    graph_from_model(model, |a, b| {
        Ok(!ci_test(model, a, b, NodeSet::EMPTY, tol)?)
    })
}

/// Edge `i – j` iff `i` and `j` are dependent given all other variables.
pub fn concentration_graph_of(model: &GaussianModel, tol: f64) -> Result<MixedGraph> {
    let all = NodeSet::full(model.dim());
    graph_from_model(model, |a, b| {
        let rest = all - NodeSet::singleton(a) - NodeSet::singleton(b);
        Ok(!ci_test(model, a, b, rest, tol)?)
    })
}

/// Number of `(i, j, K)` queries on which the model disagrees with the
/// covariance criterion, and the number checked.
pub fn count_mismatches(
    graph: &MixedGraph,
    model: &GaussianModel,
    tol: f64,
) -> Result<(usize, usize)> {
    let n = model.dim();
    let all = NodeSet::full(n);
    let (mut mismatches, mut checked) = (0, 0);
    for i in 0..n {
        for j in i + 1..n {
            let rest = all - NodeSet::singleton(i) - NodeSet::singleton(j);
            for given in rest.subsets() {
                let triple = CiTriple::pair(i, j, given)?;
                let numeric = ci_test(model, i, j, given, tol)?;
                if numeric != covariance_independent(graph, &triple) {
                    mismatches += 1;
                }
                checked += 1;
            }
        }
    }
    Ok((mismatches, checked))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub checked: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub nodes: usize,
    pub edges: usize,
    pub tolerance: f64,
    pub trials: Vec<TrialOutcome>,
    pub faithful_trials: usize,
    pub faithful_fraction: f64,
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples `trials` models and compares every `(i, j, K)` determinant test
/// against the covariance criterion.
pub fn faithfulness_report(
    graph: &MixedGraph,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<FaithfulnessReport> {
    guard(graph, "faithfulness_report", FAITHFULNESS_MAX_NODES)?;
    GraphKind::Covariance.check(graph)?;
    if trials == 0 {
        return Err(Error::InvalidMatrix(
            "at least one trial is required".into(),
        ));
    }
    let graph = compact(graph);
    let mut outcomes = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = derive_seed(seed, t as u64);
        let model = sample_markov_gaussian(&graph, trial_seed)?;
        let (mismatches, checked) = count_mismatches(&graph, &model, tol)?;
        outcomes.push(TrialOutcome {
            seed: trial_seed,
            checked,
            mismatches,
        });
    }
    let faithful_trials = outcomes.iter().filter(|o| o.mismatches == 0).count();
    Ok(FaithfulnessReport {
        nodes: graph.node_count(),
        edges: graph.undirected_edge_count(),
        tolerance: tol,
        faithful_fraction: faithful_trials as f64 / trials as f64,
        trials: outcomes,
        faithful_trials,
    })
}

/// Whether two UGs share connected components, and whether each tree
/// component of either graph is complete in the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedComponents {
    pub same_components: bool,
    pub trees_map_to_complete: bool,
}

fn component_edges(graph: &MixedGraph, component: NodeSet) -> usize {
    graph.induced_subgraph(component).undirected_edge_count()
}

pub fn check_shared_components(
    covariance: &MixedGraph,
    concentration: &MixedGraph,
) -> SharedComponents {
    let cov = covariance.connectivity_components();
    let conc = concentration.connectivity_components();
    let same_components = cov == conc;
    let tree_then_complete = |from: &MixedGraph, to: &MixedGraph| {
        from.connectivity_components().into_iter().all(|c| {
            let k = c.len();
            component_edges(from, c) + 1 != k || component_edges(to, c) == k * (k - 1) / 2
        })
    };
    SharedComponents {
        same_components,
        trees_map_to_complete: same_components
            && tree_then_complete(covariance, concentration)
            && tree_then_complete(concentration, covariance),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> MixedGraph {
        MixedGraph::parse("A -- B\nB -- C\nC -- D\nD -- A").unwrap()
    }

    #[test]
    fn single_edge_sample_is_in_the_box() {
        let g = MixedGraph::parse("A -- B").unwrap();
        for seed in 0..50 {
            let m = sample_markov_gaussian(&g, seed).unwrap();
            for i in 0..2 {
                let d = m.sigma().get(i, i);
                assert!((1.5..2.5).contains(&d), "diagonal {d}");
                assert!(m.mean()[i].abs() <= 1.0);
            }
            assert!(m.sigma().get(0, 1).abs() <= 1.0);
            assert!(m.sigma().is_positive_definite());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = cycle4();
        assert_eq!(
            sample_markov_gaussian(&g, 3).unwrap(),
            sample_markov_gaussian(&g, 3).unwrap()
        );
        assert_ne!(
            sample_markov_gaussian(&g, 3).unwrap(),
            sample_markov_gaussian(&g, 4).unwrap()
        );
    }

    #[test]
    fn structural_zeros() {
        let m = sample_markov_gaussian(&cycle4(), 11).unwrap();
        assert_eq!(m.sigma().get(0, 2), 0.0);
        assert_eq!(m.sigma().get(1, 3), 0.0);
        let edgeless = MixedGraph::with_default_labels(3).unwrap();
        let m = sample_markov_gaussian(&edgeless, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.sigma().get(i, j) == 0.0, i != j);
            }
        }
    }

    #[test]
    fn hand_built_ci_tests() {
        let sigma = SquareMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 2.0]]).unwrap();
        let m = GaussianModel::from_covariance(sigma).unwrap();
        assert!(!ci_test(&m, 0, 1, NodeSet::EMPTY, DEFAULT_TOLERANCE).unwrap());

        let mut diag = SquareMatrix::zeros(4);
        for i in 0..4 {
            diag.set(i, i, 1.0 + i as f64);
        }
        let m = GaussianModel::from_covariance(diag).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let rest = NodeSet::full(4) - NodeSet::singleton(i) - NodeSet::singleton(j);
                for k in rest.subsets() {
                    assert!(ci_test(&m, i, j, k, DEFAULT_TOLERANCE).unwrap());
                }
            }
        }
    }

    #[test]
    fn ci_test_argument_errors() {
        let m = sample_markov_gaussian(&cycle4(), 0).unwrap();
        assert!(ci_test(&m, 0, 0, NodeSet::EMPTY, 1e-9).is_err());
        assert!(ci_test(&m, 0, 1, NodeSet::singleton(1), 1e-9).is_err());
        assert!(ci_test(&m, 0, 9, NodeSet::EMPTY, 1e-9).is_err());
        assert!(ci_test(&m, 0, 1, NodeSet::EMPTY, 0.0).is_err());
    }

    #[test]
    fn cycle_sample_matches_the_graph() {
        let g = cycle4();
        let m = sample_markov_gaussian(&g, 5).unwrap();
        assert!(ci_test(&m, 0, 2, NodeSet::EMPTY, DEFAULT_TOLERANCE).unwrap());
        assert!(!ci_test(&m, 0, 2, NodeSet::singleton(1), DEFAULT_TOLERANCE).unwrap());
        assert_eq!(covariance_graph_of(&m, DEFAULT_TOLERANCE).unwrap(), g);
    }

    #[test]
    fn recovered_graphs_of_special_matrices() {
        let mut diag = SquareMatrix::zeros(3);
        for i in 0..3 {
            diag.set(i, i, 2.0);
        }
        let m = GaussianModel::from_covariance(diag).unwrap();
        assert_eq!(
            covariance_graph_of(&m, DEFAULT_TOLERANCE)
                .unwrap()
                .edge_count(),
            0
        );
        assert_eq!(
            concentration_graph_of(&m, DEFAULT_TOLERANCE)
                .unwrap()
                .edge_count(),
            0
        );

        let dense = SquareMatrix::from_rows(&[
            vec![3.0, 0.4, 0.3],
            vec![0.4, 3.0, 0.2],
            vec![0.3, 0.2, 3.0],
        ])
        .unwrap();
        let m = GaussianModel::from_covariance(dense).unwrap();
        assert_eq!(
            covariance_graph_of(&m, DEFAULT_TOLERANCE)
                .unwrap()
                .edge_count(),
            3
        );
        assert_eq!(
            concentration_graph_of(&m, DEFAULT_TOLERANCE)
                .unwrap()
                .edge_count(),
            3
        );
    }

    #[test]
    fn path_has_complete_concentration_graph() {
        let g = MixedGraph::parse("A -- B\nB -- C").unwrap();
        let m = sample_markov_gaussian(&g, 1).unwrap();
        let conc = concentration_graph_of(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(conc.undirected_edge_count(), 3);
        let cov = covariance_graph_of(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(
            check_shared_components(&cov, &conc),
            SharedComponents {
                same_components: true,
                trees_map_to_complete: true
            }
        );
    }

    #[test]
    fn nd_count() {
        let g = cycle4();
        let nd = NdParameterization::new(&g);
        assert_eq!(nd.nd_count, 12);
        let m = sample_markov_gaussian(&g, 2).unwrap();
        assert_eq!(nd.parameters(&m).len(), nd.nd_count);
    }

    #[test]
    fn faithfulness_examples() {
        let edgeless = MixedGraph::with_default_labels(3).unwrap();
        let report = faithfulness_report(&edgeless, 10, 0, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(report.faithful_trials, 10);
        let report = faithfulness_report(&cycle4(), 100, 0, DEFAULT_TOLERANCE).unwrap();
        assert!(
            report.faithful_fraction >= 0.95,
            "{}",
            report.faithful_fraction
        );
        let triangle = MixedGraph::parse("A -- B\nA -- C\nB -- C").unwrap();
        let report = faithfulness_report(&triangle, 100, 0, DEFAULT_TOLERANCE).unwrap();
        assert!(report.faithful_fraction >= 0.95);
        assert!(faithfulness_report(&triangle, 0, 0, DEFAULT_TOLERANCE).is_err());
    }

    #[test]
    fn rejects_invalid_models() {
        let sigma = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(
            GaussianModel::from_covariance(sigma),
            Err(Error::NotPositiveDefinite)
        );
        let asym = SquareMatrix::from_rows(&[vec![1.0, 0.2], vec![0.1, 1.0]]).unwrap();
        assert!(GaussianModel::from_covariance(asym).is_err());
    }
}
