use thiserror::Error;

use crate::bvp::SolveReport;

pub type Result<T> = std::result::Result<T, WavefanError>;

#[derive(Error, Debug)]
pub enum WavefanError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("Newton iteration did not converge after {} iterations (residual {:.3e})", .report.iterations, .report.final_residual())]
    NonConvergence { report: Box<SolveReport> },

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    #[error("continuation stage eps = {eps}: {source}")]
    Stage {
        eps: f64,
        #[source]
        source: Box<WavefanError>,
    },

    #[error("integration failed at xi = {xi}: step size underflow ({step:.3e})")]
    Integration { xi: f64, step: f64 },

    #[error("degenerate profile: zero slope at node {node}")]
    DegenerateProfile { node: usize },

    #[error("unsupported flux: {0}")]
    UnsupportedFlux(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("inconclusive uniqueness probe: only {converged} of {attempted} runs converged")]
    InconclusiveProbe { converged: usize, attempted: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: line {line}: {reason}")]
    MalformedFile {
        path: String,
        line: u64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl WavefanError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        WavefanError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Unwraps continuation-stage annotations.
    pub fn root_cause(&self) -> &WavefanError {
        match self {
            WavefanError::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
