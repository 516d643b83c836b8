use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The function does not change sign across the supplied bracket.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative method hit its iteration cap.
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    Convergence { iterations: usize, last: f64 },

    /// The coupled 3D system failed to settle; `history` is the number of
    /// iterates produced before giving up.
    #[error("coupled solve for n = {qnums:?} did not converge after {history} iterates")]
    FixedPoint { qnums: Vec<u32>, history: usize },

    /// A level solve failed; carries the mode and box that triggered it.
    #[error("solving n = {qnums:?} in box {lengths:?}: {reason}")]
    Level {
        qnums: Vec<u32>,
        lengths: Vec<f64>,
        reason: Box<Error>,
    },

    /// The enumeration lattice bound is too small for the requested cutoff.
    #[error("cutoff needs quantum numbers up to {needed}, lattice bound is {bound}")]
    Capacity { needed: u64, bound: u32 },
}

impl Error {
    /// True for failures of the iterative solvers, as opposed to bad input
    /// or capacity limits.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Bracket { .. } | Error::Convergence { .. } | Error::FixedPoint { .. } => true,
            Error::Level { reason, .. } => reason.is_solver_failure(),
            Error::Domain(_) | Error::Capacity { .. } => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
