use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NhqaError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("critical-point singularity: {0}")]
    Singular(String),
    #[error("exceptional point: eigenvector Gram determinant {det:.3e} at t = {t}")]
    ExceptionalPoint { t: f64, det: f64 },
    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },
    #[error("quadrature did not converge (achieved {achieved:.3e}, requested {requested:.3e})")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("weber evaluation failed: {0}")]
    Weber(String),
    #[error("no bracket for root in [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("zero norm: survival probability vanished")]
    ZeroNorm,
    #[error("{count} mode(s) failed: {detail}")]
    Modes { count: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, NhqaError>;
