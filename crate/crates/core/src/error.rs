use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver did not converge")]
    NoConvergence,

    /// The inverse taken during composition is numerically singular, i.e. the
    /// evaluation frequency sits on a pole of the composed system.
    #[error("on-resonance singularity at omega = {omega} (reciprocal condition {rcond:.3e})")]
    OnResonance { omega: Complex64, rcond: f64 },

    /// A resolvent or scattering matrix could not be inverted at `omega`.
    #[error("singular matrix at omega = {omega}: {what}")]
    Singular { omega: Complex64, what: &'static str },

    #[error("no threshold in range [{lo}, {hi}]")]
    NoThreshold { lo: f64, hi: f64 },

    #[error("fewer than two levels in the spectral window")]
    TooFewLevels,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
