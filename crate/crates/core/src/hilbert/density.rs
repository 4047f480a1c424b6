use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::diagonal_mixture;
use super::{Operator, STRUCTURAL_TOL};
use crate::{Error, Result};

/// A validated density operator: Hermitian, unit trace, positive
/// semidefinite (each to 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(STRUCTURAL_TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let trace = op.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STRUCTURAL_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let eigenvalues = hermitian_eigenvalues(op.entries());
        if let Some(min) = eigenvalues.iter().copied().reduce(f64::min) {
            if min < -STRUCTURAL_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
            }
        }
        Ok(Self { op, eigenvalues })
    }

    /// Σ wᵢ |eᵢ⟩⟨eᵢ| over basis indices of a `dim`-dimensional space.
    pub fn diagonal(dim: usize, weighted: &[(usize, f64)]) -> Result<Self> {
        if let Some(&(i, _)) = weighted.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: i + 1,
            });
        }
        Self::new(diagonal_mixture(dim, weighted.iter().copied()))
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Tr(ρ²).
pub fn purity(rho: &DensityOperator) -> f64 {
    // Tr(ρ²) = Σᵢⱼ |ρᵢⱼ|² for Hermitian ρ.
    rho.op.entries().iter().map(|c| c.norm_sqr()).sum()
}

/// Von Neumann entropy −Σ λ ln λ in nats, with 0·ln 0 = 0.
pub fn mixture_entropy(rho: &DensityOperator) -> f64 {
    let s: f64 = rho
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{projector, BasisLabel, StateVector};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn pure_state_diagnostics() {
        let psi = StateVector::new(
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
            BasisLabel::Modes,
        )
        .unwrap();
        let rho = DensityOperator::new(projector(&psi).unwrap()).unwrap();
        assert!((purity(&rho) - 1.0).abs() < 1e-12);
        assert!(mixture_entropy(&rho).abs() < 1e-12);
    }

    #[test]
    fn equal_mixture_of_n() {
        for n in 1..=6usize {
            let w: Vec<_> = (0..n).map(|i| (i, 1.0 / n as f64)).collect();
            let rho = DensityOperator::diagonal(n, &w).unwrap();
            assert!((purity(&rho) - 1.0 / n as f64).abs() < 1e-12);
            assert!((mixture_entropy(&rho) - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn half_quarter_quarter() {
        let rho = DensityOperator::diagonal(3, &[(0, 0.5), (1, 0.25), (2, 0.25)]).unwrap();
        assert!((purity(&rho) - 0.375).abs() < 1e-12);
        assert!((mixture_entropy(&rho) - 1.5 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn invalid_operators_rejected() {
        assert!(DensityOperator::diagonal(2, &[(0, 0.5)]).is_err());
        assert!(DensityOperator::diagonal(2, &[(0, 1.5), (1, -0.5)]).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        m[(1, 0)] = Complex64::new(0.0, 0.3);
        assert!(DensityOperator::new(Operator::new(m).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn weights_give_closed_form_purity_and_entropy(
            raw in prop::collection::vec(0.0f64..1.0, 1..9)
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-3);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let indexed: Vec<_> = w.iter().copied().enumerate().collect();
            let rho = DensityOperator::diagonal(w.len(), &indexed).unwrap();
            let expected_purity: f64 = w.iter().map(|x| x * x).sum();
            let expected_entropy: f64 = w.iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum();
            prop_assert!((purity(&rho) - expected_purity).abs() <= 1e-12);
            prop_assert!((mixture_entropy(&rho) - expected_entropy).abs() <= 1e-10);
            if w.iter().filter(|&&x| x > 0.0).count() >= 2 {
                prop_assert!(purity(&rho) < 1.0);
            }
        }
    }
}
