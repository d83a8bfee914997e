use thiserror::Error;

/// Errors raised by the solvers, oracles and sweeps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument outside function domain: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (bracket width {width})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("quadrature on [{lo}, {hi}] did not reach tolerance after {subdivisions} subdivisions (error estimate {estimate})")]
    QuadratureNonConvergence { lo: f64, hi: f64, subdivisions: usize, estimate: f64 },

    #[error("solution is infeasible: {0}")]
    Infeasible(String),

    #[error("environment admits no feasible contract: {0}")]
    InfeasibleEnvironment(String),

    #[error("profit difference is discontinuous at {at}: {detail}")]
    NotACrossing { at: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
