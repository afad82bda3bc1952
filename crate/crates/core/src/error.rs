use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo:e} and f(hi) = {f_hi:e} do not change sign")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },

    #[error("step size underflow at t = {t} (h = {step:e}); the right-hand side is stiff or singular")]
    StepUnderflow { t: f64, step: f64 },

    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    QrNotConverged { sweeps: usize },

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:e})")]
    InverseIterationFailed { iterations: usize, residual: f64 },

    #[error("eigenvalue index {index} unavailable: only {available} trusted eigenvalues")]
    EigenvalueIndex { index: usize, available: usize },

    #[error("bracket growth exceeded |h| = {limit:e} without straddling the target")]
    BracketGrowth { limit: f64 },

    #[error("backends disagree at lambda = {lambda}: galerkin {galerkin}, prufer {prufer}")]
    BackendDisagreement { lambda: f64, galerkin: f64, prufer: f64 },
}
