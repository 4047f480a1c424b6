use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;
use crate::{Error, Result};

/// A dense square operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "operator must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Matrix element ⟨row|O|col⟩.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn apply(&self, ket: &StateVector) -> Result<StateVector> {
        self.check_dim(ket.dim())?;
        Ok(StateVector::from_dvector(
            &self.entries * ket.as_dvector(),
            ket.basis().clone(),
        ))
    }

    /// ⟨ψ|O|ψ⟩.
    pub fn expectation(&self, ket: &StateVector) -> Result<Complex64> {
        self.check_dim(ket.dim())?;
        Ok(ket.as_dvector().dotc(&(&self.entries * ket.as_dvector())))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() <= tol))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Panics on dimension mismatch; use [`Operator::compose`] for a checked product.
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries * &rhs.entries,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries - &rhs.entries,
        }
    }
}

/// |k⟩⟨k| for a normalized ket.
pub fn projector(ket: &StateVector) -> Result<Operator> {
    if !ket.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: ket.norm_sqr(),
        });
    }
    let v = ket.as_dvector();
    Ok(Operator {
        entries: v * v.adjoint(),
    })
}

/// Σ wᵢ |eᵢ⟩⟨eᵢ| over computational basis vectors of `dim`.
pub(crate) fn diagonal_mixture(dim: usize, weighted: impl IntoIterator<Item = (usize, f64)>) -> Operator {
    let mut entries = DMatrix::zeros(dim, dim);
    for (index, weight) in weighted {
        entries[(index, index)] += Complex64::new(weight, 0.0);
    }
    Operator { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::BasisLabel;
    use crate::hilbert::STRUCTURAL_TOL;
    use proptest::prelude::*;

    #[test]
    fn basis_projector() {
        let k1 = StateVector::basis_state(2, 0, BasisLabel::Modes).unwrap();
        let p = projector(&k1).unwrap();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert_eq!(p.entries(), &expected);
        assert_eq!(p.trace(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unnormalized_projector_rejected() {
        let v = StateVector::new(vec![Complex64::new(2.0, 0.0)], BasisLabel::Modes).unwrap();
        assert!(matches!(projector(&v), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn non_square_rejected() {
        assert!(Operator::new(DMatrix::zeros(2, 3)).is_err());
    }

    proptest! {
        #[test]
        fn projector_is_hermitian_idempotent_unit_trace(
            parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10)
        ) {
            let amps: Vec<_> = parts.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            let v = StateVector::new(amps, BasisLabel::Modes).unwrap();
            prop_assume!(v.norm_sqr() > 1e-6);
            let p = projector(&v.normalize().unwrap()).unwrap();
            prop_assert!(p.is_hermitian(STRUCTURAL_TOL));
            prop_assert!((&p * &p).max_abs_diff(&p) <= STRUCTURAL_TOL);
            prop_assert!((p.trace() - 1.0).norm() <= STRUCTURAL_TOL);
        }
    }
}
