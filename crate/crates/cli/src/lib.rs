//! Command implementations behind the `covdep` binary.
//!
//! Each command returns an [`Outcome`]: the text to print and the exit code.
//! Exit code 0 means the queried property holds (or verification passed),
//! 1 that it does not, and 2 is reserved for errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use covdep_core::closure::saturate;
use covdep_core::connection::dependence_witness;
use covdep_core::gaussian::{
    check_shared_components, concentration_graph_of, covariance_graph_of, faithfulness_report,
    sample_markov_gaussian, SharedComponents, DEFAULT_TOLERANCE,
};
use covdep_core::linalg::SquareMatrix;
use covdep_core::report::{TripleLine, VerificationReport};
use covdep_core::sweeps::{run_scope, Scope, SweepConfig, FAITHFUL_FRACTION_THRESHOLD};
use covdep_core::transforms::{latent_dag, verify_latent_equivalence};
use covdep_core::{
    ci_independent, CiTriple, GaussianModel, GraphKind, MixedGraph, NdParameterization, NodeSet,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] covdep_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn new(holds: bool, stdout: String) -> Self {
        Outcome {
            code: if holds { 0 } else { 1 },
            stdout,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "covdep",
    version,
    about = "Read independencies and dependencies off covariance graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is X independent of Y given Z according to the graph?
    Indep(QueryArgs),
    /// Does the single-path dependence criterion certify X and Y dependent given Z?
    Dep(QueryArgs),
    /// Saturate the dependence base and list every established dependency.
    Closure(GraphArgs),
    /// Print the derivation tree of one established dependency.
    Explain(QueryArgs),
    /// Run verification sweeps over families of small graphs.
    Verify(VerifyArgs),
    /// Sample Gaussian models, test independencies numerically, check faithfulness.
    Gaussian(GaussianArgs),
    /// Build the latent collider DAG of a covariance graph.
    Latent(LatentArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file.
    #[arg(short = 'g', long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "covariance")]
    pub kind: GraphKind,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SetArgs {
    /// Comma-separated labels.
    #[arg(short = 'X', value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    #[arg(short = 'Y', value_delimiter = ',', required = true)]
    pub y: Vec<String>,
    /// Conditioning set; empty when absent.
    #[arg(short = 'Z', value_delimiter = ',')]
    pub z: Vec<String>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub sets: SetArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub scope: Scope,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled models per graph in the Gaussian sweeps.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    /// Covariance graph to sample from.
    #[arg(short = 'g', long, conflicts_with = "matrix")]
    pub graph: Option<PathBuf>,
    /// Covariance matrix file: the dimension, then the rows.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(short = 'X', value_delimiter = ',', requires = "y")]
    pub x: Vec<String>,
    #[arg(short = 'Y', value_delimiter = ',', requires = "x")]
    pub y: Vec<String>,
    #[arg(short = 'Z', value_delimiter = ',')]
    pub z: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run a faithfulness check over this many sampled models.
    #[arg(long, conflicts_with_all = ["matrix", "x"])]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct LatentArgs {
    #[arg(short = 'g', long)]
    pub graph: PathBuf,
    /// Also check that c-separation in the DAG matches the covariance criterion.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub json: bool,
}

/// `indep` and `dep` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryReport {
    pub command: String,
    pub kind: GraphKind,
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub nodes: usize,
    pub sweeps: usize,
    pub established: Vec<TripleLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub established: bool,
    pub tree: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub seed: u64,
    pub labels: Vec<String>,
    pub mean: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub nd_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: String,
    pub j: String,
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianQueryReport {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub tolerance: f64,
    pub independent: bool,
    pub pairs: Vec<PairVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub labels: Vec<String>,
    pub covariance_graph: Vec<[String; 2]>,
    pub concentration_graph: Vec<[String; 2]>,
    pub shared: SharedComponents,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentNode {
    pub edge: [String; 2],
    pub latent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentReport {
    pub graph: String,
    pub latents: Vec<LatentNode>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<VerificationReport>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_graph(path: &Path) -> CliResult<MixedGraph> {
    Ok(MixedGraph::parse(&read(path)?)?)
}

fn resolve(graph: &MixedGraph, labels: &[String]) -> CliResult<NodeSet> {
    let labels: Vec<&str> = labels
        .iter()
        .map(String::as_str)
        .filter(|l| !l.is_empty())
        .collect();
    Ok(graph.resolve(&labels)?)
}

fn triple(graph: &MixedGraph, x: &[String], y: &[String], z: &[String]) -> CliResult<CiTriple> {
    Ok(CiTriple::new(
        resolve(graph, x)?,
        resolve(graph, y)?,
        resolve(graph, z)?,
    )?)
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Indep(args) => cmd_indep(&args),
        Command::Dep(args) => cmd_dep(&args),
        Command::Closure(args) => cmd_closure(&args),
        Command::Explain(args) => cmd_explain(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Gaussian(args) => cmd_gaussian(&args),
        Command::Latent(args) => cmd_latent(&args),
    }
}

fn query_report(
    command: &str,
    graph: &MixedGraph,
    kind: GraphKind,
    t: &CiTriple,
    holds: bool,
) -> QueryReport {
    QueryReport {
        command: command.to_string(),
        kind,
        x: graph.set_labels(t.x()),
        y: graph.set_labels(t.y()),
        z: graph.set_labels(t.z()),
        holds,
        witness: None,
    }
}

pub fn cmd_indep(args: &QueryArgs) -> CliResult<Outcome> {
    let graph = load_graph(&args.graph.graph)?;
    let t = triple(&graph, &args.sets.x, &args.sets.y, &args.sets.z)?;
    let holds = ci_independent(&graph, args.graph.kind, &t)?;
    let text = if args.graph.json {
        to_json(&query_report("indep", &graph, args.graph.kind, &t, holds))?
    } else if holds {
        "INDEPENDENT\n".to_string()
    } else {
        "NOT INDEPENDENT\n".to_string()
    };
    Ok(Outcome::new(holds, text))
}

pub fn cmd_dep(args: &QueryArgs) -> CliResult<Outcome> {
    let graph = load_graph(&args.graph.graph)?;
    let t = triple(&graph, &args.sets.x, &args.sets.y, &args.sets.z)?;
    let witness = dependence_witness(&graph, args.graph.kind, &t)?;
    let holds = witness.is_some();
    let text = if args.graph.json {
        let mut report = query_report("dep", &graph, args.graph.kind, &t, holds);
        report.witness = witness.as_ref().map(|w| {
            w.nodes
                .iter()
                .map(|&v| graph.label(v).to_string())
                .collect()
        });
        to_json(&report)?
    } else {
        match &witness {
            Some(w) => format!("DEPENDENT, witness {}\n", w.display(&graph)),
            None => "NOT DEPENDENT\n".to_string(),
        }
    };
    Ok(Outcome::new(holds, text))
}

fn require_covariance(kind: GraphKind, command: &str) -> CliResult<()> {
    if kind == GraphKind::Covariance {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{command} is defined for covariance graphs only"
        )))
    }
}

pub fn cmd_closure(args: &GraphArgs) -> CliResult<Outcome> {
    require_covariance(args.kind, "closure")?;
    let graph = load_graph(&args.graph)?;
    let state = saturate(&graph)?;
    let lines = state.report_lines();
    let text = if args.json {
        to_json(&ClosureReport {
            nodes: graph.node_count(),
            sweeps: state.sweeps(),
            established: lines,
        })?
    } else {
        let mut out: String = lines.iter().map(|l| l.to_text() + "\n").collect();
        out.push_str(&format!(
            "# {} dependencies established after {} sweeps\n",
            state.len(),
            state.sweeps()
        ));
        out
    };
    Ok(Outcome::new(true, text))
}

pub fn cmd_explain(args: &QueryArgs) -> CliResult<Outcome> {
    require_covariance(args.graph.kind, "explain")?;
    let graph = load_graph(&args.graph.graph)?;
    let t = triple(&graph, &args.sets.x, &args.sets.y, &args.sets.z)?;
    let state = saturate(&graph)?;
    let established = state.contains(&t);
    let tree = if established {
        state.explain(&t)?
    } else {
        format!("{} ; not established\n", t.display(&graph))
    };
    let text = if args.graph.json {
        to_json(&ExplainReport {
            x: graph.set_labels(t.x()),
            y: graph.set_labels(t.y()),
            z: graph.set_labels(t.z()),
            established,
            tree: tree.lines().map(str::to_string).collect(),
        })?
    } else {
        tree
    };
    Ok(Outcome::new(established, text))
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let config = SweepConfig {
        n_max: args.n_max,
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
    };
    let report = run_scope(args.scope, &config)?;
    let text = if args.json {
        to_json(&report)?
    } else {
        let mut out = String::new();
        for sweep in &report.sweeps {
            out.push_str(&sweep.summary_line());
            out.push('\n');
            for failure in sweep.failures.iter().take(5) {
                out.push_str(&format!(
                    "  {} [{}]: {}\n",
                    failure.check,
                    failure.graph,
                    failure.violations.len()
                ));
                for v in failure.violations.iter().take(3) {
                    out.push_str(&format!("    {}\n", v.to_text()));
                }
            }
        }
        out.push_str(if report.passed { "PASS\n" } else { "FAIL\n" });
        out
    };
    Ok(Outcome::new(report.passed, text))
}

fn edge_labels(graph: &MixedGraph) -> Vec<[String; 2]> {
    graph
        .undirected_edges()
        .into_iter()
        .map(|(a, b)| [graph.label(a).to_string(), graph.label(b).to_string()])
        .collect()
}

fn gaussian_query(args: &GaussianArgs, model: &GaussianModel) -> CliResult<Outcome> {
    let index = MixedGraph::new(model.labels().iter().cloned())?;
    let t = triple(&index, &args.x, &args.y, &args.z)?;
    let mut pairs = Vec::new();
    for i in t.x() {
        for j in t.y() {
            pairs.push(PairVerdict {
                i: index.label(i).to_string(),
                j: index.label(j).to_string(),
                independent: model.ci_test(i, j, t.z(), args.tol)?,
            });
        }
    }
    // pairwise verdicts decide the set statement: Gaussians satisfy composition
    let independent = pairs.iter().all(|p| p.independent);
    let text = if args.json {
        to_json(&GaussianQueryReport {
            x: index.set_labels(t.x()),
            y: index.set_labels(t.y()),
            z: index.set_labels(t.z()),
            tolerance: args.tol,
            independent,
            pairs,
        })?
    } else if independent {
        "INDEPENDENT\n".to_string()
    } else {
        "DEPENDENT\n".to_string()
    };
    Ok(Outcome::new(independent, text))
}

pub fn cmd_gaussian(args: &GaussianArgs) -> CliResult<Outcome> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let query = !args.x.is_empty();
    if let Some(path) = &args.matrix {
        let model = GaussianModel::from_covariance(SquareMatrix::parse(&read(path)?)?)?;
        if query {
            return gaussian_query(args, &model);
        }
        let cov = covariance_graph_of(&model, args.tol)?;
        let conc = concentration_graph_of(&model, args.tol)?;
        let report = MatrixReport {
            labels: model.labels().to_vec(),
            covariance_graph: edge_labels(&cov),
            concentration_graph: edge_labels(&conc),
            shared: check_shared_components(&cov, &conc),
        };
        let text = if args.json {
            to_json(&report)?
        } else {
            format!(
                "# covariance graph\n{}# concentration graph\n{}",
                cov.to_text(),
                conc.to_text()
            )
        };
        return Ok(Outcome::new(true, text));
    }
    let Some(path) = &args.graph else {
        return Err(CliError::Usage("gaussian needs --graph or --matrix".into()));
    };
    let graph = load_graph(path)?;
    if let Some(trials) = args.trials {
        let report = faithfulness_report(&graph, trials, args.seed, args.tol)?;
        let holds = report.faithful_fraction >= FAITHFUL_FRACTION_THRESHOLD;
        let text = if args.json {
            to_json(&report)?
        } else {
            format!(
                "faithful in {} of {} sampled models ({:.4}) at tol {:e}\n",
                report.faithful_trials, trials, report.faithful_fraction, report.tolerance
            )
        };
        return Ok(Outcome::new(holds, text));
    }
    let model = sample_markov_gaussian(&graph, args.seed)?;
    if query {
        return gaussian_query(args, &model);
    }
    let nd = NdParameterization::new(&graph);
    let text = if args.json {
        to_json(&SampleReport {
            seed: args.seed,
            labels: model.labels().to_vec(),
            mean: model.mean().to_vec(),
            sigma: model.sigma().rows(),
            nd_count: nd.nd_count,
        })?
    } else {
        let mean: Vec<String> = model.mean().iter().map(f64::to_string).collect();
        format!(
            "# labels {}\n# mean {}\n# free parameters {}\n{}",
            model.labels().join(" "),
            mean.join(" "),
            nd.nd_count,
            model.sigma().to_text()
        )
    };
    Ok(Outcome::new(true, text))
}

pub fn cmd_latent(args: &LatentArgs) -> CliResult<Outcome> {
    let graph = load_graph(&args.graph)?;
    let latent = latent_dag(&graph)?;
    let verification = if args.verify {
        Some(verify_latent_equivalence(&graph)?)
    } else {
        None
    };
    let holds = verification.as_ref().is_none_or(|v| v.passed);
    let text = if args.json {
        to_json(&LatentReport {
            graph: latent.dag.to_text(),
            latents: latent
                .latents
                .iter()
                .map(|(&(a, b), &l)| LatentNode {
                    edge: [graph.label(a).to_string(), graph.label(b).to_string()],
                    latent: latent.dag.label(l).to_string(),
                })
                .collect(),
            verification,
        })?
    } else {
        let mut out = latent.dag.to_text();
        if let Some(v) = &verification {
            out.push_str(&format!("# {}\n", v.summary_line()));
        }
        out
    };
    Ok(Outcome::new(holds, text))
}
