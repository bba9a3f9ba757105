use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver failed to converge within {max_iters} QR iterations")]
    NonConvergence { max_iters: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("closed-form Liouvillian spectrum requires zero detuning, got delta = {0}")]
    DetuningNotZero(f64),

    #[error("no eigenvalue-coalescence point in gamma bracket [{lo}, {hi}]")]
    NoCoalescence { lo: f64, hi: f64 },

    #[error("sweep grid must be non-empty, finite and strictly monotone")]
    BadGrid,

    #[error("state became non-finite at step {step}; reduce the step size")]
    NonFiniteState { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
