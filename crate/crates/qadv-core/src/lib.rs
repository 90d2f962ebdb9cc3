//! Adversary lower bounds for read-once Boolean functions, plus a
//! desk-scale simulator of the quantum query model that checks the
//! progress-measure inequalities the bounds rest on.
//!
//! The pipeline: parse a read-once AND/OR formula ([`formula`]), enumerate
//! its critical inputs and the neighbor relation between them ([`critical`]),
//! build the amplitude vector that solves the first-order optimality
//! conditions with Lagrange constant `1/sqrt(n)` ([`readonce`]), and evaluate
//! the resulting query lower bound ([`adversary`]). The [`simulator`] runs
//! concrete query algorithms and traces the progress measure step by step.
//!
//! With the default `parallel` feature, enumeration and multi-input
//! simulation fan out over rayon; disable it for a fully sequential build.
//! Outputs are identical either way.

pub mod adversary;
pub mod bits;
pub mod critical;
pub mod error;
mod exec;
pub mod formula;
mod numeric;
pub mod readonce;
pub mod simulator;

pub use bits::BitString;
pub use error::{Error, Result};
