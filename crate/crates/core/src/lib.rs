//! Reading conditional independencies and dependencies off covariance
//! graphs.
//!
//! A covariance graph joins two variables iff they are marginally dependent.
//! This crate provides
//!
//! - chain-graph separation and the dual covariance-graph independence
//!   criterion ([`separation`]),
//! - single-path dependence criteria for covariance and concentration graphs
//!   ([`connection`]),
//! - a saturation engine for the contrapositive WTC graphoid rules with
//!   derivation provenance ([`closure`]),
//! - a Gaussian oracle testing independence by determinant vanishing
//!   ([`gaussian`]),
//! - the latent collider DAG construction and forest checks ([`transforms`]),
//! - verification sweeps over families of small graphs ([`sweeps`]).

pub mod closure;
pub mod connection;
pub mod enumerate;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod linalg;
pub mod nodeset;
pub mod report;
pub mod separation;
pub mod sweeps;
pub mod transforms;

pub use closure::{saturate, ClosureState, Derivation, Rule, RuleApplication};
pub use connection::{con, conc_dependent, cov_dependent, PathWitness};
pub use error::{Error, Result};
pub use gaussian::{GaussianModel, NdParameterization};
pub use graph::{GraphKind, MixedGraph};
pub use nodeset::NodeSet;
pub use separation::{ci_independent, sep, CiTriple};
pub use transforms::LatentDag;
