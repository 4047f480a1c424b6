use nalgebra::DVector;
use num_complex::Complex64;

use super::STRUCTURAL_TOL;
use crate::{Error, Result};

/// Which basis a vector's components refer to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Single-mode photon-number basis `|0⟩, |1⟩, …, |n_max⟩`.
    FockNumber,
    /// Multimode one-photon sector `|0⟩, |k₁⟩, …, |k_M⟩`.
    OnePhotonSector,
    /// One-photon mode basis without the vacuum: `|k₁⟩, …, |k_N⟩`.
    Modes,
    Named(String),
}

/// A ket |ψ⟩ of dimension ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    basis: BasisLabel,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, basis: BasisLabel) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state vector dimension must be >= 1".into()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("state amplitudes must be finite".into()));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
            basis,
        })
    }

    /// The `index`-th basis ket.
    pub fn basis_state(dim: usize, index: usize, basis: BasisLabel) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps, basis)
    }

    pub(crate) fn from_dvector(amplitudes: DVector<Complex64>, basis: BasisLabel) -> Self {
        Self { amplitudes, basis }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= STRUCTURAL_TOL
    }

    /// Rescales to unit norm. The zero vector cannot be normalized.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(norm),
            basis: self.basis.clone(),
        })
    }

    /// ⟨ψ|, the conjugated dual.
    pub fn dual(&self) -> DualVector {
        DualVector {
            amplitudes: self.amplitudes.map(|c| c.conj()),
        }
    }
}

/// A bra ⟨φ|. Amplitudes are stored already conjugated, so pairing with a
/// ket is a plain bilinear sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    amplitudes: DVector<Complex64>,
}

impl DualVector {
    /// Builds a bra from its (already conjugated) row components.
    pub fn from_row(amplitudes: Vec<Complex64>) -> Self {
        Self {
            amplitudes: DVector::from_vec(amplitudes),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    /// Conjugates back to a ket in the given basis.
    pub fn dual(&self, basis: BasisLabel) -> StateVector {
        StateVector::from_dvector(self.amplitudes.map(|c| c.conj()), basis)
    }
}

/// ⟨bra|ket⟩.
pub fn inner_product(bra: &DualVector, ket: &StateVector) -> Result<Complex64> {
    if bra.dim() != ket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bra.dim(),
            found: ket.dim(),
        });
    }
    Ok(bra
        .amplitudes
        .iter()
        .zip(ket.amplitudes.iter())
        .map(|(b, k)| b * k)
        .sum())
}
