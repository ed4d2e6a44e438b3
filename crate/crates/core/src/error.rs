use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singular(String),

    #[error("quadrature failed to reach tolerance: estimated error {estimate:.3e}, requested {requested:.3e}")]
    Accuracy { estimate: f64, requested: f64 },

    #[error("infeasible simulation grid: {0}")]
    InfeasibleGrid(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("s = {s} lies outside the resolvable band [{lo}, {hi}]")]
    Band { s: f64, lo: f64, hi: f64 },

    #[error("kernel recovery is singular at s = {s} (denominator {denominator:.3e})")]
    SingularRecovery { s: f64, denominator: f64 },

    #[error("integration step {step} exceeds the stability limit 0.1/omega_max = {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
