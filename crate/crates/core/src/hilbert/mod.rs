//! Finite-dimensional complex Hilbert-space core.
//!
//! Two Fock constructions are provided: a single-mode number basis
//! truncated at `n_max` (ladder algebra, coherent states) and the multimode
//! one-photon sector `{|0⟩, |k₁⟩, …, |k_M⟩}` used for field operators and
//! the vacuum two-point factorization. Everything is dense; dimensions are
//! expected to stay below a few hundred.

mod density;
mod fock;
mod mode;
mod operator;
mod state;

pub use density::{mixture_entropy, purity, DensityOperator};
pub use fock::{
    coherent_state, field_operator, ladder_operators, number_operator, photon_number_stats,
    poisson_tail_mass, FieldComponent, FockSpace, PhotonNumberStats,
};
pub use mode::{FieldMode, ModeBasis, Polarization, SpacetimePoint};
pub use operator::{projector, Operator};
pub use state::{inner_product, BasisLabel, DualVector, StateVector};

/// Tolerance for structural identities (normalization, hermiticity, trace).
pub const STRUCTURAL_TOL: f64 = 1e-12;
