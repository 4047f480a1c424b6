use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error(
        "Fock truncation inadequate: |alpha|^2 = {mean_photons} exceeds n_max/4 = {limit} \
         (discarded Poisson tail mass {tail_mass:e})"
    )]
    Truncation {
        mean_photons: f64,
        limit: f64,
        tail_mass: f64,
    },

    #[error("cannot absorb from an empty mode (n = 0)")]
    EmptyMode,

    #[error("inconsistent mode bases: {0}")]
    ModeBasisMismatch(String),

    #[error("quadrature did not converge: estimate {estimate}, residual error {error_estimate:e}")]
    Quadrature { estimate: f64, error_estimate: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// Stable machine-readable identifier used by the CLI and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotNormalized { .. } => "not_normalized",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidDensity(_) => "invalid_density",
            Error::Truncation { .. } => "truncation",
            Error::EmptyMode => "empty_mode",
            Error::ModeBasisMismatch(_) => "mode_basis_mismatch",
            Error::Quadrature { .. } => "quadrature",
            Error::Scenario(_) => "invalid_scenario",
        }
    }
}
