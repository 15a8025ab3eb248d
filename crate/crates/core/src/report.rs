//! Line-oriented and JSON report records shared by the sweeps and the CLI.

use serde::{Deserialize, Serialize};

use crate::graph::MixedGraph;
use crate::separation::CiTriple;

/// One `X ; Y ; Z ; status` row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleLine {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub status: String,
}

impl TripleLine {
    pub fn new(graph: &MixedGraph, triple: &CiTriple, status: impl Into<String>) -> Self {
        TripleLine {
            x: graph.set_labels(triple.x()),
            y: graph.set_labels(triple.y()),
            z: graph.set_labels(triple.z()),
            status: status.into(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "{} ; {} ; {} ; {}",
            self.x.join(","),
            self.y.join(","),
            self.z.join(","),
            self.status
        )
    }
}

/// Outcome of checking one property over one graph or one sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub checked: usize,
    pub passed: bool,
    pub violations: Vec<TripleLine>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, checked: usize, violations: Vec<TripleLine>) -> Self {
        VerificationReport {
            check: check.into(),
            checked,
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} ({} checked, {} violations)",
            self.check,
            if self.passed { "PASS" } else { "FAIL" },
            self.checked,
            self.violations.len()
        )
    }
}
