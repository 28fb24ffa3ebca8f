use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("inclusion Lamé pair is not a scalar multiple of the background pair")]
    NonProportional,
    #[error("kernel evaluated at its singular point x = 0")]
    Singularity,
    #[error("quasi-momentum |alpha| = {norm:.3e} is below the cutoff {cutoff:.3e}")]
    NearZeroAlpha { norm: f64, cutoff: f64 },
    #[error("quasi-momentum component {0} lies outside [-pi, pi]")]
    AlphaOutOfZone(f64),
    #[error("wavenumber |k|/sqrt(mu) = {ratio:.4} exceeds the admissible window {limit:.4}")]
    ResonantDenominator { ratio: f64, limit: f64 },
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("estimated condition number {0:.3e} exceeds the 1e12 guard")]
    IllConditioned(f64),
    #[error("positivity violated: smallest eigenvalue {0:.3e}")]
    Positivity(f64),
    #[error("evaluation point at distance {distance:.3e} from the boundary, below h_min = {h_min:.3e}")]
    NearField { distance: f64, h_min: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear algebra failure: {0}")]
    Solver(String),
    #[error("dip pairing failed: {0}")]
    Pairing(String),
    #[error("{failed} of {total} Brillouin samples failed")]
    SweepFailed { failed: usize, total: usize },
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
