use thiserror::Error;

use crate::state::State;

#[derive(Debug, Error)]
pub enum Error {
    /// A state left the admissible set of its model (or is not finite).
    #[error("inadmissible state {state:?}: {reason}")]
    Domain { state: State, reason: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("inconsistent geometry: {0}")]
    Geometry(String),

    #[error("invalid graph structure: {0}")]
    Structure(String),

    /// Residuals handed to flux recovery do not sum to the boundary parts.
    #[error("residuals are not conservative: defect {defect:e} exceeds tolerance {tolerance:e}")]
    ConservationViolation { defect: f64, tolerance: f64 },

    #[error("entropy correction impossible on element {element}: all entropy variables coincide but the defect is {defect:e}")]
    CorrectionImpossible { element: usize, defect: f64 },

    #[error("mid-value recovery failed in cell {cell}: {reason}")]
    Recovery { cell: usize, reason: String },

    #[error("jacobian splitting failed at node {node}")]
    Splitting { node: usize },

    #[error("step rejected: inadmissible state at dof {dof}")]
    StepRejected { dof: usize },

    #[error("run failed at step {step}: {source}")]
    Run {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("exact solution unavailable: {0}")]
    Oracle(String),

    #[error("weak-form diagnostic: {0}")]
    Diagnostic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
