//! Experiment orchestration for the skggp engine: scenario configs,
//! baseline-vs-surrogate plans, resumable runs, and the analyses that turn
//! run logs into CSV artifacts (convergence, budget saved, surrogate
//! quality, timing, final comparison).

pub mod config;
pub mod context;
pub mod curves;
pub mod gain;
pub mod plan;
pub mod quality;
pub mod report;
pub mod stats;
pub mod timing;

use std::fmt;

/// Errors mapped to process exit codes: config 2, resume divergence 3,
/// sampling failure 4, anything else 1.
#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    ResumeDivergence(String),
    Sampling(String),
    Io(std::io::Error),
    Other(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(m) => write!(f, "config error: {m}"),
            HarnessError::ResumeDivergence(m) => write!(f, "resume divergence: {m}"),
            HarnessError::Sampling(m) => write!(f, "sampling failure: {m}"),
            HarnessError::Io(e) => write!(f, "io error: {e}"),
            HarnessError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::ResumeDivergence(_) => 3,
            HarnessError::Sampling(_) => 4,
            HarnessError::Io(_) | HarnessError::Other(_) => 1,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

impl From<skggp_core::project::GenerateError> for HarnessError {
    fn from(e: skggp_core::project::GenerateError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<skggp_core::project::InstanceError> for HarnessError {
    fn from(e: skggp_core::project::InstanceError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<skggp_core::phenotype::SamplingError> for HarnessError {
    fn from(e: skggp_core::phenotype::SamplingError) -> Self {
        HarnessError::Sampling(e.to_string())
    }
}

impl From<skggp_core::gp::EngineError> for HarnessError {
    fn from(e: skggp_core::gp::EngineError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Other(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Other(format!("json error: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
