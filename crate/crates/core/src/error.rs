use thiserror::Error;

/// Errors raised by the determinant pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid argument: {0}")]
    Usage(String),

    /// An eigenvalue of the far-field matrix sits on (or too close to) the
    /// imaginary axis, so the stable projector is not defined.
    #[error("spectral gap violation: eigenvalue {re:+e}{im:+e}i has |Re| <= {gap_tol:e}")]
    SpectralGap { re: f64, im: f64, gap_tol: f64 },

    /// An iterative routine hit its iteration cap.
    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    /// The requested dense matrix is larger than the configured cap.
    #[error("matrix of {required} rows exceeds the cap of {cap} rows")]
    ResourceCap { required: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
