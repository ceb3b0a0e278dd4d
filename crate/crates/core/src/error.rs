//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("step size underflow at t = {t:e} (h = {h:e}); last state {state:?}")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("step budget of {max_steps} exhausted at t = {t:e}")]
    StepBudget { max_steps: usize, t: f64 },

    #[error("event bracketing failed on [{lo:e}, {hi:e}]")]
    EventBracket { lo: f64, hi: f64 },

    #[error("no sign change on bracket [{lo:e}, {hi:e}] (f(lo) = {flo:e}, f(hi) = {fhi:e})")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("singular pivot in banded solve at row {row}")]
    SingularPivot { row: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("profile did not converge to the left state: {0}")]
    NoConvergence(String),

    #[error("simulation aborted at t = {t}: {reason}")]
    SimulationAbort { t: f64, reason: String },

    #[error("certificate failed: {0}")]
    CertificateFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::Precondition(_) | Error::Config(_) => 3,
            Error::CertificateFailure(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
