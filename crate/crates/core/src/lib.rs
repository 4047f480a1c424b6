//! Numerical simulator for the transactional (direct-action) account of
//! radiative measurement.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: finite-dimensional state vectors, operators, Fock
//!   truncations, ladder and field operators, coherent states, and
//!   density-operator diagnostics.
//! - [`propagators`]: iε-regularized momentum-space Green's functions of the
//!   massless field, their retarded/advanced and principal-value/delta
//!   decompositions, and the one-photon factorization of the vacuum
//!   two-point function.
//! - [`perturbation`]: first-order emission/absorption time kernels, the
//!   emission×absorption squaring identity, and the golden-rule limit.
//! - [`transactions`]: the offer → confirmation → mixture → collapse pipeline
//!   and its seeded Monte Carlo statistics.
//! - [`cli`]: the batch command-line surface (`txsim` binary).
//!
//! Natural units ℏ = c = 1 are used throughout.

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod perturbation;
pub mod propagators;
pub mod quadrature;
pub mod transactions;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Library version echoed into every emitted result document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CODATA 2018 fine-structure constant.
pub const FINE_STRUCTURE: f64 = 0.0072973525693;
