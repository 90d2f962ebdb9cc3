//! Crate-wide error type.

use crate::bits::BitString;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("variable x{var} appears more than once")]
    ReadOnceViolation { var: u32 },

    #[error("input has {got} bits but the formula reads {expected} variables")]
    LengthMismatch { expected: u32, got: u32 },

    #[error("tree is not normalized: {reason}")]
    NotNormalized { reason: String },

    #[error("formula has {n} variables; at most 64 are supported")]
    TooManyVariables { n: usize },

    #[error("problem size {needed} exceeds the cap of {cap}")]
    SizeLimit { needed: u128, cap: usize },

    #[error("weight on ({x}, {y}) violates the support condition: {reason}")]
    SupportViolation {
        x: BitString,
        y: BitString,
        reason: String,
    },

    #[error("epsilon {epsilon} is outside the open interval (0, 1/2)")]
    BadEpsilon { epsilon: f64 },

    #[error("nu is zero; the bound is undefined for this weight matrix")]
    DegenerateNu,

    #[error("power iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator {index} deviates from unitarity by {deviation:.3e}")]
    NonUnitary { index: usize, deviation: f64 },

    #[error("projectors are invalid: {reason} (deviation {deviation:.3e})")]
    InvalidProjectors { reason: String, deviation: f64 },

    #[error("amplitude vector is not a unit vector: |alpha|^2 = {norm_sq}")]
    NotNormalizedAmplitude { norm_sq: f64 },

    #[error("negative weight {value} on ({x}, {y})")]
    NegativeWeight { x: BitString, y: BitString, value: f64 },

    #[error("state norm drifted to {norm} at step {step}")]
    NormDrift { step: usize, norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
