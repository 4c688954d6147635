//! Rigidity bench: runs the approximation pipeline on a family of symplectic
//! maps converging in `C^0` and reports every intermediate gate.

pub mod config;
pub mod expr;
pub mod families;
pub mod pipeline;
pub mod report;
pub mod steps;

use thiserror::Error;

pub use config::{FamilyKind, ScenarioConfig};
pub use pipeline::run_scenario;
pub use report::RigidityReport;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("gate failure in step {step}: {detail}")]
    GateFailure { step: String, detail: String, report: Box<RigidityReport> },
    #[error("numeric budget exceeded after {stage}: {elapsed:.3e} s > {limit:.3e} s")]
    NumericBudgetExceeded { elapsed: f64, limit: f64, stage: String, report: Box<RigidityReport> },
    #[error("unknown step {0:?}")]
    UnknownStep(String),
    #[error("I/O failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit code: 2 for a gate failure, 3 for the budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::GateFailure { .. } => 2,
            BenchError::NumericBudgetExceeded { .. } => 3,
            _ => 1,
        }
    }

    /// The partial report carried by a failed run.
    pub fn report(&self) -> Option<&RigidityReport> {
        match self {
            BenchError::GateFailure { report, .. }
            | BenchError::NumericBudgetExceeded { report, .. } => Some(report),
            _ => None,
        }
    }
}
