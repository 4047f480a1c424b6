use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BasisLabel, ModeBasis, Operator, SpacetimePoint, StateVector};
use crate::{Error, Result};

/// A truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub enum FockSpace {
    /// Single mode, number states `|0⟩ … |n_max⟩`; dimension `n_max + 1`.
    SingleMode { n_max: usize },
    /// Vacuum plus one photon in any of the modes; dimension `1 + M`.
    OnePhoton { modes: ModeBasis },
}

impl FockSpace {
    pub fn single_mode(n_max: usize) -> Self {
        FockSpace::SingleMode { n_max }
    }

    pub fn one_photon(modes: ModeBasis) -> Self {
        FockSpace::OnePhoton { modes }
    }

    pub fn dim(&self) -> usize {
        match self {
            FockSpace::SingleMode { n_max } => n_max + 1,
            FockSpace::OnePhoton { modes } => 1 + modes.len(),
        }
    }

    /// Maximum total occupation retained by the truncation.
    pub fn sector_cutoff(&self) -> usize {
        match self {
            FockSpace::SingleMode { n_max } => *n_max,
            FockSpace::OnePhoton { .. } => 1,
        }
    }

    pub fn basis_label(&self) -> BasisLabel {
        match self {
            FockSpace::SingleMode { .. } => BasisLabel::FockNumber,
            FockSpace::OnePhoton { .. } => BasisLabel::OnePhotonSector,
        }
    }

    fn require_single_mode(&self) -> Result<usize> {
        match self {
            FockSpace::SingleMode { n_max } => Ok(*n_max),
            FockSpace::OnePhoton { .. } => Err(Error::InvalidArgument(
                "operation requires the single-mode Fock construction".into(),
            )),
        }
    }
}

/// Annihilation and creation operators `(â, â†)` on a single truncated mode.
/// `â†|n_max⟩ = 0` by truncation.
pub fn ladder_operators(space: &FockSpace) -> Result<(Operator, Operator)> {
    let n_max = space.require_single_mode()?;
    if n_max == 0 {
        return Err(Error::InvalidArgument(
            "ladder operators need n_max >= 1".into(),
        ));
    }
    let dim = n_max + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let a = Operator::new(a)?;
    let a_dag = a.adjoint();
    Ok((a, a_dag))
}

/// `n̂ = diag(0, 1, …, n_max)`.
pub fn number_operator(space: &FockSpace) -> Result<Operator> {
    let n_max = space.require_single_mode()?;
    let diag: Vec<Complex64> = (0..=n_max).map(|n| Complex64::new(n as f64, 0.0)).collect();
    Operator::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

/// Cartesian component of the vector potential to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldComponent {
    X,
    Y,
    Z,
}

impl FieldComponent {
    pub fn index(self) -> usize {
        match self {
            FieldComponent::X => 0,
            FieldComponent::Y => 1,
            FieldComponent::Z => 2,
        }
    }
}

/// One Cartesian component of the quantized vector potential at `point`,
/// restricted to the one-photon sector of `modes`:
///
/// Â(x) = Σₖ √(1/(2ωₖV)) εₖ [âₖ e^{i(k·x−ωt)} + âₖ† e^{−i(k·x−ωt)}]
///
/// Row/column 0 is the vacuum, index `1 + i` is one photon in mode `i`.
pub fn field_operator(
    modes: &ModeBasis,
    point: &SpacetimePoint,
    volume: f64,
    component: FieldComponent,
) -> Result<Operator> {
    if modes.is_empty() {
        return Err(Error::InvalidArgument("field operator needs at least one mode".into()));
    }
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "quantization volume must be positive, got {volume}"
        )));
    }
    let dim = 1 + modes.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, mode) in modes.modes().iter().enumerate() {
        let prefactor = (1.0 / (2.0 * mode.omega() * volume)).sqrt();
        let eps = mode.polarization_vector()[component.index()];
        let amp = Complex64::from_polar(prefactor * eps, mode.phase(point));
        // ⟨0|âₖ|k⟩ = 1 and ⟨k|âₖ†|0⟩ = 1.
        m[(0, i + 1)] = amp;
        m[(i + 1, 0)] = amp.conj();
    }
    Operator::new(m)
}

/// Poisson(`mean`) probability mass above `n_max`.
pub fn poisson_tail_mass(mean: f64, n_max: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    // Sum the tail directly from log-space terms; the retained mass would
    // lose the tiny tail to cancellation in 1 − Σ.
    let mut n = n_max + 1;
    let mut log_term = -mean + n as f64 * mean.ln() - ln_factorial(n);
    let mut tail = 0.0;
    loop {
        let term = log_term.exp();
        tail += term;
        if (n as f64) > mean && term <= tail * 1e-17 {
            break;
        }
        n += 1;
        log_term += mean.ln() - (n as f64).ln();
        if n > n_max + 100_000 {
            break;
        }
    }
    tail.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Coherent state |α⟩ ∝ e^{αâ†}|0⟩ truncated at `n_max` and renormalized.
///
/// Requires |α|² ≤ n_max/4; otherwise the discarded Poisson tail is
/// reported in the error.
pub fn coherent_state(alpha: Complex64, space: &FockSpace) -> Result<StateVector> {
    let n_max = space.require_single_mode()?;
    let mean = alpha.norm_sqr();
    let limit = n_max as f64 / 4.0;
    if mean > limit {
        return Err(Error::Truncation {
            mean_photons: mean,
            limit,
            tail_mass: poisson_tail_mass(mean, n_max),
        });
    }
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-mean / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    StateVector::new(amps, BasisLabel::FockNumber)?.normalize()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberStats {
    pub mean: f64,
    pub variance: f64,
    /// P(n) for n = 0..=n_max.
    pub distribution: Vec<f64>,
}

/// Photon-number distribution, mean and variance of a single-mode state.
pub fn photon_number_stats(state: &StateVector) -> Result<PhotonNumberStats> {
    if state.basis() != &BasisLabel::FockNumber {
        return Err(Error::InvalidArgument(
            "photon-number statistics need a Fock number-basis state".into(),
        ));
    }
    let norm = state.norm_sqr();
    let distribution: Vec<f64> = state.amplitudes().iter().map(|c| c.norm_sqr() / norm).collect();
    let mean: f64 = distribution.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let variance: f64 = distribution
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean).powi(2) * p)
        .sum();
    Ok(PhotonNumberStats {
        mean,
        variance,
        distribution,
    })
}
