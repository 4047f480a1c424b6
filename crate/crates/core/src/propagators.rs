//! iε-regularized momentum-space propagators of the massless field.
//!
//! Signature (+,−,−,−): k² = k0² − |k⃗|². All components share one Lorentzian
//! regulator ε, which turns the principal-value/delta decomposition
//! 1/(x + iε) = P_ε(x) − iπ δ_ε(x) into an exact identity at finite ε.
//! Distributional limits are only ever evaluated via pairings with smooth
//! test functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::hilbert::{
    field_operator, inner_product, BasisLabel, FieldComponent, FockSpace, ModeBasis, Operator,
    SpacetimePoint, StateVector,
};
use crate::quadrature::{integrate_with_breaks, QuadSettings};
use crate::{Error, Result};

/// Momentum argument (k0, |k⃗|) with regulator ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorPoint {
    k0: f64,
    k_abs: f64,
    epsilon: f64,
}

impl PropagatorPoint {
    pub fn new(k0: f64, k_abs: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "regulator epsilon must be positive, got {epsilon}"
            )));
        }
        if !(k_abs >= 0.0 && k_abs.is_finite()) || !k0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite k0 and k_abs >= 0, got k0 = {k0}, k_abs = {k_abs}"
            )));
        }
        Ok(Self { k0, k_abs, epsilon })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn k_abs(&self) -> f64 {
        self.k_abs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// k² = k0² − |k⃗|².
    pub fn k_sq(&self) -> f64 {
        self.k0 * self.k0 - self.k_abs * self.k_abs
    }

    /// Same point with k0 replaced.
    pub fn with_k0(&self, k0: f64) -> Self {
        Self { k0, ..*self }
    }
}

/// D_F(k) = 1/(k² + iε).
pub fn d_feynman(p: &PropagatorPoint) -> Complex64 {
    Complex64::new(p.k_sq(), p.epsilon).inv()
}

/// D_ret(k) = 1/((k0 + iε)² − |k⃗|²).
pub fn d_retarded(p: &PropagatorPoint) -> Complex64 {
    let k0 = Complex64::new(p.k0, p.epsilon);
    (k0 * k0 - p.k_abs * p.k_abs).inv()
}

/// D_adv(k) = 1/((k0 − iε)² − |k⃗|²).
pub fn d_advanced(p: &PropagatorPoint) -> Complex64 {
    let k0 = Complex64::new(p.k0, -p.epsilon);
    (k0 * k0 - p.k_abs * p.k_abs).inv()
}

/// Time-symmetric propagator D̄ = ½D_ret + ½D_adv. Real, since the two are
/// complex conjugates.
pub fn d_timesym(p: &PropagatorPoint) -> Complex64 {
    0.5 * d_retarded(p) + 0.5 * d_advanced(p)
}

/// Principal-value and nascent-delta parts of 1/(x + iε).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SokhotskiSplit {
    /// P_ε(x) = x/(x² + ε²)
    pub principal: f64,
    /// δ_ε(x) = (1/π) ε/(x² + ε²)
    pub delta: f64,
}

impl SokhotskiSplit {
    /// P_ε − iπ δ_ε.
    pub fn reassemble(&self) -> Complex64 {
        Complex64::new(self.principal, -PI * self.delta)
    }
}

pub fn principal_part(x: f64, epsilon: f64) -> f64 {
    x / (x * x + epsilon * epsilon)
}

pub fn nascent_delta(x: f64, epsilon: f64) -> f64 {
    epsilon / (x * x + epsilon * epsilon) / PI
}

/// Splits D_F at x = k² into P_ε(x) and δ_ε(x).
pub fn sokhotski_split(p: &PropagatorPoint) -> SokhotskiSplit {
    let x = p.k_sq();
    SokhotskiSplit {
        principal: principal_part(x, p.epsilon),
        delta: nascent_delta(x, p.epsilon),
    }
}

/// Normalized Gaussian test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    center: f64,
    width: f64,
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Gaussian test function needs finite center and width > 0, got ({center}, {width})"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn eval(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        (-0.5 * z * z).exp() / (self.width * (2.0 * PI).sqrt())
    }
}

/// Which regularized distribution to pair with a test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairingKernel {
    /// P_ε(x) in the variable x = k².
    PrincipalValue,
    /// δ_ε(x) in the variable x = k².
    Delta,
    /// D_F = 1/(x + iε) in the variable x = k².
    Feynman,
    /// Re D_F − D̄ along k0 at fixed |k⃗|; vanishes as ε → 0.
    RealPartDefect { k_abs: f64 },
}

impl PairingKernel {
    fn eval(&self, s: f64, epsilon: f64) -> Complex64 {
        match *self {
            PairingKernel::PrincipalValue => Complex64::new(principal_part(s, epsilon), 0.0),
            PairingKernel::Delta => Complex64::new(nascent_delta(s, epsilon), 0.0),
            PairingKernel::Feynman => Complex64::new(s, epsilon).inv(),
            PairingKernel::RealPartDefect { k_abs } => {
                let p = PropagatorPoint {
                    k0: s,
                    k_abs,
                    epsilon,
                };
                Complex64::new(d_feynman(&p).re - d_timesym(&p).re, 0.0)
            }
        }
    }

    fn poles(&self) -> Vec<f64> {
        match *self {
            PairingKernel::RealPartDefect { k_abs } => {
                if k_abs == 0.0 {
                    vec![0.0]
                } else {
                    vec![-k_abs, k_abs]
                }
            }
            _ => vec![0.0],
        }
    }

    fn is_real(&self) -> bool {
        !matches!(self, PairingKernel::Feynman)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearedValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Half-width of the quadrature window, in test-function widths.
const WINDOW_WIDTHS: f64 = 12.0;

/// ∫ kernel(s; ε) g(s) ds by adaptive quadrature over g's support
/// (±12 widths), with breakpoints clustered at the kernel's poles on the
/// scale of ε.
pub fn smeared_pairing(kernel: PairingKernel, g: &TestFunction, epsilon: f64) -> Result<SmearedValue> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "regulator epsilon must be positive, got {epsilon}"
        )));
    }
    let lo = g.center - WINDOW_WIDTHS * g.width;
    let hi = g.center + WINDOW_WIDTHS * g.width;
    let mut points = vec![lo, hi];
    for pole in kernel.poles() {
        for decade in 0..=8 {
            let offset = epsilon * 10f64.powi(decade);
            for candidate in [pole - offset, pole, pole + offset] {
                if candidate > lo && candidate < hi {
                    points.push(candidate);
                }
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let settings = QuadSettings {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 100_000,
    };
    let re = integrate_with_breaks(|s| kernel.eval(s, epsilon).re * g.eval(s), &points, &settings)?;
    let (im_value, im_err) = if kernel.is_real() {
        (0.0, 0.0)
    } else {
        let im = integrate_with_breaks(|s| kernel.eval(s, epsilon).im * g.eval(s), &points, &settings)?;
        (im.value, im.error_estimate)
    };
    Ok(SmearedValue {
        value: Complex64::new(re.value, im_value),
        error_estimate: re.error_estimate.hypot(im_err),
    })
}

/// Least-squares slope of log|error| against log ε.
pub fn fitted_order(epsilons: &[f64], errors: &[f64]) -> Result<f64> {
    if epsilons.len() != errors.len() || epsilons.len() < 2 {
        return Err(Error::InvalidArgument(
            "order fit needs at least two (epsilon, error) pairs".into(),
        ));
    }
    if epsilons.iter().chain(errors).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "order fit needs finite nonzero epsilons and errors".into(),
        ));
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Direct versus mode-summed vacuum two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationReport {
    /// ⟨0|Â(x)Â(y)|0⟩ from the operator product.
    pub direct_value: Complex64,
    /// Σₖ ⟨0|Â(x)|k⟩⟨k|Â(y)|0⟩ from one-photon insertions.
    pub mode_sum_value: Complex64,
    pub max_abs_deviation: f64,
}

/// Vacuum two-point function of one field component on the one-photon
/// sector, computed by operator product and by explicit insertion of the
/// one-photon states.
pub fn factorization_check(
    sector: &FockSpace,
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    volume: f64,
    component: FieldComponent,
) -> Result<FactorizationReport> {
    let FockSpace::OnePhoton { modes } = sector else {
        return Err(Error::ModeBasisMismatch(
            "factorization needs the multimode one-photon sector".into(),
        ));
    };
    let ax = field_operator(modes, x, volume, component)?;
    let ay = field_operator(modes, y, volume, component)?;
    factorize_operators(&ax, &ay)
}

/// Same as [`factorization_check`] for a bare mode list.
pub fn factorization_check_modes(
    modes: &ModeBasis,
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    volume: f64,
    component: FieldComponent,
) -> Result<FactorizationReport> {
    factorization_check(&FockSpace::one_photon(modes.clone()), x, y, volume, component)
}

/// Factorization check on two already-built one-photon-sector field
/// operators. Index 0 is the vacuum.
pub fn factorize_operators(ax: &Operator, ay: &Operator) -> Result<FactorizationReport> {
    if ax.dim() != ay.dim() {
        return Err(Error::ModeBasisMismatch(format!(
            "field operators act on different sectors ({} vs {})",
            ax.dim(),
            ay.dim()
        )));
    }
    let dim = ax.dim();
    let vacuum = StateVector::basis_state(dim, 0, BasisLabel::OnePhotonSector)?;
    let vacuum_bra = vacuum.dual();

    let product = ax.compose(ay)?;
    let direct_value = product.get(0, 0);

    let ax_dag_vac = ax.adjoint().apply(&vacuum)?;
    let ay_vac = ay.apply(&vacuum)?;
    let mut mode_sum_value = Complex64::new(0.0, 0.0);
    for k in 1..dim {
        let ket = StateVector::basis_state(dim, k, BasisLabel::OnePhotonSector)?;
        // ⟨0|Â(x)|k⟩ = conj(⟨k|Â(x)†|0⟩)
        let left = inner_product(&ket.dual(), &ax_dag_vac)?.conj();
        let right = inner_product(&ket.dual(), &ay_vac)?;
        mode_sum_value += left * right;
    }
    // The vacuum term ⟨0|Â(x)|0⟩⟨0|Â(y)|0⟩ vanishes identically.
    let vacuum_term = inner_product(&vacuum_bra, &ax.apply(&vacuum)?)?
        * inner_product(&vacuum_bra, &ay_vac)?;
    mode_sum_value += vacuum_term;

    Ok(FactorizationReport {
        direct_value,
        mode_sum_value,
        max_abs_deviation: (direct_value - mode_sum_value).norm(),
    })
}
