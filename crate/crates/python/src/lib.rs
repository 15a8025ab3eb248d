//! Python bindings: graphs, independence and dependence queries, the closure
//! engine, the latent collider DAG and the Gaussian oracle.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use covdep_core::closure::saturate;
use covdep_core::connection::dependence_witness;
use covdep_core::gaussian::{faithfulness_report, sample_markov_gaussian, DEFAULT_TOLERANCE};
use covdep_core::sweeps::{run_scope, Scope, SweepConfig};
use covdep_core::transforms::{is_forest, latent_dag, verify_latent_equivalence};
use covdep_core::{
    ci_independent, CiTriple, GaussianModel, GraphKind, MixedGraph, NdParameterization,
};

fn err(e: covdep_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(name: &str) -> PyResult<GraphKind> {
    name.parse().map_err(err)
}

/// `(x, y, z, rule)`.
type ClosureLine = (Vec<String>, Vec<String>, Vec<String>, String);

/// A mixed graph with labelled nodes.
#[pyclass(name = "Graph", module = "covdep", frozen)]
pub struct PyGraph {
    inner: MixedGraph,
}

impl PyGraph {
    fn triple(&self, x: Vec<String>, y: Vec<String>, z: Vec<String>) -> PyResult<CiTriple> {
        let resolve = |labels: &[String]| self.inner.resolve(labels).map_err(err);
        CiTriple::new(resolve(&x)?, resolve(&y)?, resolve(&z)?).map_err(err)
    }
}

#[pymethods]
impl PyGraph {
    /// Parses the line format (`node A`, `A -- B`, `A -> B`, `#` comments).
    #[new]
    #[pyo3(signature = (text = ""))]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: MixedGraph::parse(text).map_err(err)?,
        })
    }

    /// An undirected graph from labels and label pairs.
    #[staticmethod]
    fn undirected(labels: Vec<String>, edges: Vec<(String, String)>) -> PyResult<Self> {
        let mut graph = MixedGraph::new(labels).map_err(err)?;
        for (a, b) in edges {
            let index = |l: &str| {
                graph
                    .node_index(l)
                    .ok_or_else(|| err(covdep_core::Error::UnknownLabel(l.to_string())))
            };
            let (a, b) = (index(&a)?, index(&b)?);
            graph.add_undirected(a, b).map_err(err)?;
        }
        Ok(PyGraph { inner: graph })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.set_labels(self.inner.vertices())
    }

    #[getter]
    fn edges(&self) -> Vec<(String, String)> {
        let g = &self.inner;
        g.undirected_edges()
            .into_iter()
            .map(|(a, b)| (g.label(a).to_string(), g.label(b).to_string()))
            .collect()
    }

    #[getter]
    fn arrows(&self) -> Vec<(String, String)> {
        let g = &self.inner;
        g.directed_edges()
            .into_iter()
            .map(|(a, b)| (g.label(a).to_string(), g.label(b).to_string()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} nodes, {} edges)",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn is_forest(&self) -> bool {
        is_forest(&self.inner)
    }

    /// Independence verdict under the reading selected by `kind`.
    #[pyo3(signature = (x, y, z = Vec::new(), kind = "covariance"))]
    fn indep(&self, x: Vec<String>, y: Vec<String>, z: Vec<String>, kind: &str) -> PyResult<bool> {
        let t = self.triple(x, y, z)?;
        ci_independent(&self.inner, self::kind(kind)?, &t).map_err(err)
    }

    /// The witness path as a label list when the dependence criterion fires,
    /// otherwise `None`.
    #[pyo3(signature = (x, y, z = Vec::new(), kind = "covariance"))]
    fn dep(
        &self,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        kind: &str,
    ) -> PyResult<Option<Vec<String>>> {
        let t = self.triple(x, y, z)?;
        let witness = dependence_witness(&self.inner, self::kind(kind)?, &t).map_err(err)?;
        Ok(witness.map(|w| {
            w.nodes
                .iter()
                .map(|&v| self.inner.label(v).to_string())
                .collect()
        }))
    }

    /// Every established dependency as `(x, y, z, rule)`.
    fn closure(&self) -> PyResult<Vec<ClosureLine>> {
        let state = saturate(&self.inner).map_err(err)?;
        Ok(state
            .report_lines()
            .into_iter()
            .map(|l| (l.x, l.y, l.z, l.status))
            .collect())
    }

    #[pyo3(signature = (x, y, z = Vec::new()))]
    fn explain(&self, x: Vec<String>, y: Vec<String>, z: Vec<String>) -> PyResult<String> {
        let t = self.triple(x, y, z)?;
        saturate(&self.inner)
            .and_then(|s| s.explain(&t))
            .map_err(err)
    }

    fn latent_dag(&self) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: latent_dag(&self.inner).map_err(err)?.dag,
        })
    }

    fn verify_latent(&self) -> PyResult<bool> {
        Ok(verify_latent_equivalence(&self.inner).map_err(err)?.passed)
    }

    fn free_parameters(&self) -> usize {
        NdParameterization::new(&self.inner).nd_count
    }
}

/// A regular Gaussian distribution.
#[pyclass(name = "Gaussian", module = "covdep", frozen)]
pub struct PyGaussian {
    inner: GaussianModel,
}

#[pymethods]
impl PyGaussian {
    /// Zero-mean model from a covariance matrix given as rows.
    #[new]
    fn new(sigma: Vec<Vec<f64>>) -> PyResult<Self> {
        let sigma = covdep_core::linalg::SquareMatrix::from_rows(&sigma).map_err(err)?;
        Ok(PyGaussian {
            inner: GaussianModel::from_covariance(sigma).map_err(err)?,
        })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean().to_vec()
    }

    #[getter]
    fn sigma(&self) -> Vec<Vec<f64>> {
        self.inner.sigma().rows()
    }

    /// Whether `i` and `j` (labels) are independent given `given`.
    #[pyo3(signature = (i, j, given = Vec::new(), tol = DEFAULT_TOLERANCE))]
    fn ci_test(&self, i: &str, j: &str, given: Vec<String>, tol: f64) -> PyResult<bool> {
        let index = MixedGraph::new(self.inner.labels().iter().cloned()).map_err(err)?;
        let one = |l: &str| index.resolve(&[l]).map_err(err).map(|s| s.first().unwrap());
        let given = index.resolve(&given).map_err(err)?;
        self.inner
            .ci_test(one(i)?, one(j)?, given, tol)
            .map_err(err)
    }
}

/// Draws a model Markov with respect to a covariance graph.
#[pyfunction]
#[pyo3(signature = (graph, seed = 0))]
fn sample_gaussian(graph: &PyGraph, seed: u64) -> PyResult<PyGaussian> {
    Ok(PyGaussian {
        inner: sample_markov_gaussian(&graph.inner, seed).map_err(err)?,
    })
}

/// Fraction of sampled models whose determinant tests agree with the graph
/// on every pair and conditioning set.
#[pyfunction]
#[pyo3(signature = (graph, trials = 100, seed = 0, tol = DEFAULT_TOLERANCE))]
fn faithful_fraction(graph: &PyGraph, trials: usize, seed: u64, tol: f64) -> PyResult<f64> {
    Ok(faithfulness_report(&graph.inner, trials, seed, tol)
        .map_err(err)?
        .faithful_fraction)
}

/// Runs a verification scope and returns `(passed, summary lines)`.
#[pyfunction]
#[pyo3(signature = (scope = "all", n_max = 4, seed = 0, trials = 100, tol = DEFAULT_TOLERANCE))]
fn verify(
    scope: &str,
    n_max: usize,
    seed: u64,
    trials: usize,
    tol: f64,
) -> PyResult<(bool, Vec<String>)> {
    let scope: Scope = scope.parse().map_err(err)?;
    let config = SweepConfig {
        n_max,
        seed,
        trials,
        tol,
    };
    let report = run_scope(scope, &config).map_err(err)?;
    Ok((
        report.passed,
        report.sweeps.iter().map(|s| s.summary_line()).collect(),
    ))
}

#[pymodule]
fn covdep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyGaussian>()?;
    m.add_function(wrap_pyfunction!(sample_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(faithful_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
