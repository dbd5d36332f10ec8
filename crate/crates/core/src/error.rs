use thiserror::Error;

use crate::correlated::CorrelatedPair;

/// Errors raised by state construction, criteria and the reduction algorithms.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("InvalidShape: {0}")]
    InvalidShape(String),

    #[error("NonFinite: matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("NotHermitian: max |m - m^dagger| = {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("TraceNotOne: trace = {trace} (defect {defect:e})")]
    TraceNotOne { trace: f64, defect: f64 },

    #[error("NotPSD: minimum eigenvalue {min_eigenvalue:e} is below -tol")]
    NotPSD { min_eigenvalue: f64 },

    #[error("DimensionMismatch: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("InvalidDims: {0}")]
    InvalidDims(String),

    #[error("NotProjector: max |p*p - p| = {defect:e}")]
    NotProjector { defect: f64 },

    #[error("ZeroProbability: outcome probability {probability:e} is not above tolerance")]
    ZeroProbability { probability: f64 },

    #[error("ZeroDenominator: normalization trace {value:e} is not above tolerance")]
    ZeroDenominator { value: f64 },

    #[error("NotPSDResult: update produced minimum eigenvalue {min_eigenvalue:e}")]
    NotPSDResult { min_eigenvalue: f64 },

    #[error("InvalidPointer: {0}")]
    InvalidPointer(String),

    #[error("InvalidDistribution: {0}")]
    InvalidDistribution(String),

    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("NonConvergence: no convergence after {} iterations (last step {:e})", .0.iterations, .0.last_step)]
    NonConvergence(Box<NonConvergence>),
}

/// Payload of a solver run that hit its iteration cap.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    pub iterations: usize,
    pub last_step: f64,
    /// Iterate with the smallest successive-step size seen during the run.
    pub best: CorrelatedPair,
}

pub type Result<T> = std::result::Result<T, Error>;
