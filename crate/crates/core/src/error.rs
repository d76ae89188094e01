use thiserror::Error;

/// Errors raised by the spectral models, kernels and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {message}")]
    Document { path: String, message: String },

    #[error("truncation bound {bound:.3e} at t = {t} exceeds tolerance {tol:.3e}; raise the cutoff or increase t")]
    Truncation { t: f64, bound: f64, tol: f64 },

    #[error("root bracketing failed: {0}")]
    RootBracketing(String),

    #[error("truncated domain too small: R = {radius} < {required}")]
    DomainTooSmall { radius: f64, required: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimate {estimate:.3e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("condition {0} is not handled here")]
    WrongCondition(String),

    #[error("inconsistent boundary data: {0}")]
    InconsistentBoundaryData(String),

    #[error("inconsistent family data: {0}")]
    InconsistentFamilyData(String),

    #[error("spectral gap violated: {0}")]
    GapViolation(String),

    #[error("kernel dimension jump at vertex {vertex}: {detail}")]
    KernelDimensionJump { vertex: usize, detail: String },

    #[error("grid too coarse: plaquette {plaquette} has phase {phase:.4} within 0.2 rad of ±π")]
    CoarseGrid { plaquette: usize, phase: f64 },

    #[error("sweep not in asymptotic regime: {0}")]
    NotAsymptotic(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
