use thiserror::Error;

/// Errors raised by the geometry, solver and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition of an operation does not hold (the result would be vacuous or meaningless).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A profile function could not be evaluated (non-positive warping, bad table, ...).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// The eigenvalue bracket could not be established before the growth cap.
    #[error("bracket failure: no sign change up to lambda = {lambda_hi:e} ({detail})")]
    Bracket { lambda_hi: f64, detail: String },

    /// The adaptive integrator could not make progress.
    #[error("stiffness failure at t = {t:e}: step size {step:e} underflowed (lambda = {lambda:e})")]
    Stiffness { t: f64, step: f64, lambda: f64 },

    /// An iterative method stopped at its iteration cap.
    #[error("no convergence after {iterations} iterations (last value {last:e})")]
    NonConvergence { iterations: usize, last: f64 },

    /// The computed eigenfunction has the wrong nodal structure.
    #[error("nodal structure: expected {expected} interior zero(s), found {found}")]
    Nodal { expected: usize, found: usize },

    /// Malformed profile table or other input file.
    #[error("invalid input {path}: {reason}")]
    Input { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
