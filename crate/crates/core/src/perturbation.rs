//! First-order time-dependent perturbation theory for a photon emitted by
//! one two-level atom and absorbed by another.
//!
//! The time integrals ∫₀ᵗ e^{iντ} dτ = (e^{iνt} − 1)/(iν) are evaluated in
//! the algebraically identical half-angle form t·e^{iνt/2}·sinc(νt/2), which
//! has no cancellation near resonance and makes the emission and
//! absorption kernels exact complex conjugates (ν → −ν only flips signs).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::hilbert::FieldMode;
use crate::hilbert::SpacetimePoint;
use crate::quadrature::{integrate_with_breaks, QuadSettings};
use crate::{Error, Result};

/// Below this |νt| the sinc factor switches to its Taylor series.
const RESONANCE_BRANCH: f64 = 1e-6;

/// Emitter/absorber level structure: ω₀ < ω₁, Δω = ω₁ − ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAtom {
    omega_lower: f64,
    omega_upper: f64,
}

impl TwoLevelAtom {
    pub fn new(omega_lower: f64, omega_upper: f64) -> Result<Self> {
        if !(omega_lower.is_finite() && omega_upper.is_finite() && omega_upper > omega_lower) {
            return Err(Error::InvalidArgument(format!(
                "need omega_upper > omega_lower, got ({omega_lower}, {omega_upper})"
            )));
        }
        Ok(Self {
            omega_lower,
            omega_upper,
        })
    }

    pub fn omega_lower(&self) -> f64 {
        self.omega_lower
    }

    pub fn omega_upper(&self) -> f64 {
        self.omega_upper
    }

    pub fn delta_omega(&self) -> f64 {
        self.omega_upper - self.omega_lower
    }
}

/// Coupling constants entering H_int = −(e/m) A⃗·p⃗ (natural units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingContext {
    pub e: f64,
    pub m: f64,
    pub volume: f64,
    /// ⟨B|ε⃗·p⃗|A⟩, supplied by the caller.
    pub p_ba: Complex64,
    /// Atom position for the spatial phase e^{±ik·x}.
    pub position: [f64; 3],
}

impl CouplingContext {
    pub fn new(e: f64, m: f64, volume: f64, p_ba: Complex64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "quantization volume must be positive, got {volume}"
            )));
        }
        if !e.is_finite() || !p_ba.re.is_finite() || !p_ba.im.is_finite() {
            return Err(Error::InvalidArgument("coupling must be finite".into()));
        }
        Ok(Self {
            e,
            m,
            volume,
            p_ba,
            position: [0.0; 3],
        })
    }

    /// Coupling with e = √(4π·fine_structure) (Heaviside–Lorentz units).
    pub fn from_fine_structure(fine_structure: f64, m: f64, volume: f64, p_ba: Complex64) -> Result<Self> {
        if fine_structure.is_nan() || fine_structure < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "fine-structure constant must be non-negative, got {fine_structure}"
            )));
        }
        Self::new((4.0 * PI * fine_structure).sqrt(), m, volume, p_ba)
    }

    pub fn at_position(mut self, position: [f64; 3]) -> Self {
        self.position = position;
        self
    }
}

/// Direction of the radiative half-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    Emission,
    Absorption,
}

/// Value of a first-order time kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeKernelValue {
    pub value: Complex64,
    pub omega_k: f64,
    pub t: f64,
    /// δ = Δω − ω_k.
    pub detuning: f64,
}

impl TimeKernelValue {
    fn new(value: Complex64, delta_omega: f64, omega_k: f64, t: f64) -> Self {
        let detuning = delta_omega - omega_k;
        debug_assert!({
            let expected = kernel_magnitude_sq(detuning, t);
            (value.norm_sqr() - expected).abs() <= 1e-10 * expected.max(1e-300)
        });
        Self {
            value,
            omega_k,
            t,
            detuning,
        }
    }
}

/// ∫₀ᵗ e^{iντ} dτ.
fn phase_integral(nu: f64, t: f64) -> Complex64 {
    let half = 0.5 * nu * t;
    let sinc = if (nu * t).abs() < RESONANCE_BRANCH {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    let (s, c) = half.sin_cos();
    Complex64::new(t * sinc * c, t * sinc * s)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("elapsed time must be >= 0, got {t}")));
    }
    Ok(())
}

/// ∫₀ᵗ e^{−iΔωτ} e^{iω_kτ} dτ = (e^{i(ω_k−Δω)t} − 1)/(i(ω_k − Δω)).
pub fn emission_kernel(delta_omega: f64, omega_k: f64, t: f64) -> Result<TimeKernelValue> {
    check_time(t)?;
    let value = phase_integral(omega_k - delta_omega, t);
    Ok(TimeKernelValue::new(value, delta_omega, omega_k, t))
}

/// ∫₀ᵗ e^{iΔωτ} e^{−iω_kτ} dτ, the complex conjugate of [`emission_kernel`].
pub fn absorption_kernel(delta_omega: f64, omega_k: f64, t: f64) -> Result<TimeKernelValue> {
    check_time(t)?;
    let value = phase_integral(delta_omega - omega_k, t);
    Ok(TimeKernelValue::new(value, delta_omega, omega_k, t))
}

/// |kernel|² = 4 sin²(δt/2)/δ², → t² as δ → 0.
pub fn kernel_magnitude_sq(detuning: f64, t: f64) -> f64 {
    if (detuning * t).abs() < RESONANCE_BRANCH {
        let half = 0.5 * detuning * t;
        let sinc = 1.0 - half * half / 6.0;
        return t * t * sinc * sinc;
    }
    let s = (0.5 * detuning * t).sin();
    4.0 * s * s / (detuning * detuning)
}

/// First-order matrix element of H_int = −(e/m)A⃗·p⃗ between atom states with
/// `n_photons` initially in `mode`:
///
/// −(e/m)·√(1/(2ω_kV))·p_BA·√(n+1)·e^{−ik·x} for emission,
/// −(e/m)·√(1/(2ω_kV))·p_BA·√n·e^{+ik·x} for absorption.
pub fn emission_matrix_element(
    ctx: &CouplingContext,
    mode: &FieldMode,
    n_photons: u32,
    process: Process,
) -> Result<Complex64> {
    let n = n_photons as f64;
    let (ladder, sign) = match process {
        Process::Emission => ((n + 1.0).sqrt(), -1.0),
        Process::Absorption => {
            if n_photons == 0 {
                return Err(Error::EmptyMode);
            }
            (n.sqrt(), 1.0)
        }
    };
    let prefactor = -(ctx.e / ctx.m) * (1.0 / (2.0 * mode.omega() * ctx.volume)).sqrt();
    let at = SpacetimePoint::new(0.0, ctx.position);
    let phase = Complex64::from_polar(1.0, sign * mode.phase(&at));
    Ok(ctx.p_ba * prefactor * ladder * phase)
}

/// Combined emission-and-absorption weight
/// M·conj(M)·|absorption kernel|², which equals |M·emission kernel|².
pub fn joint_amplitude(m_emit: Complex64, delta_omega: f64, omega_k: f64, t: f64) -> Result<f64> {
    let k = absorption_kernel(delta_omega, omega_k, t)?;
    Ok((m_emit * m_emit.conj()).re * k.value.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenRuleReport {
    pub t: f64,
    /// ∫ |kernel(δ, t)|² dδ over ℝ.
    pub integral: f64,
    /// 2πt.
    pub expected: f64,
    pub rel_err: f64,
    /// Contribution of |δ| > 200/t, evaluated analytically.
    pub tail: f64,
    /// Quadrature error estimate plus tail truncation bound.
    pub error_estimate: f64,
}

/// Half-width (in units of 1/t) of the numerically integrated core.
const GOLDEN_CORE: f64 = 200.0;

/// Numerically integrates 4sin²(δt/2)/δ² over the real line: adaptive
/// quadrature on |δ| ≤ 200/t with breakpoints at the zeros, plus the
/// analytic tail 2∫_L^∞ (1 − cos tδ)/δ² dδ.
pub fn golden_rule_check(t: f64) -> Result<GoldenRuleReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("golden rule needs t > 0, got {t}")));
    }
    let limit = GOLDEN_CORE / t;
    let zero_spacing = 2.0 * PI / t;
    let mut points: Vec<f64> = (0..)
        .map(|j| j as f64 * zero_spacing)
        .take_while(|&d| d < limit)
        .collect();
    points.push(limit);

    let settings = QuadSettings {
        abs_tol: 1e-12 * t,
        rel_tol: 1e-12,
        max_intervals: 10_000,
    };
    let half_core = integrate_with_breaks(|d| kernel_magnitude_sq(d, t), &points, &settings)?;

    let (tail_one_side, tail_bound) = kernel_tail(limit, t);
    let integral = 2.0 * (half_core.value + tail_one_side);
    let expected = 2.0 * PI * t;
    Ok(GoldenRuleReport {
        t,
        integral,
        expected,
        rel_err: (integral - expected).abs() / expected,
        tail: 2.0 * tail_one_side,
        error_estimate: 2.0 * (half_core.error_estimate + tail_bound),
    })
}

/// ∫_L^∞ 4sin²(tδ/2)/δ² dδ and a bound on the asymptotic truncation error.
///
/// = 2/L − 2t·[cos X/X − (π/2 − Si X)] with X = tL, using the auxiliary
/// functions π/2 − Si X = f(X) cos X + g(X) sin X.
fn kernel_tail(limit: f64, t: f64) -> (f64, f64) {
    let x = t * limit;
    let (f, g, bound) = si_auxiliary(x);
    let cos_integral = x.cos() / x - (f * x.cos() + g * x.sin());
    (2.0 / limit - 2.0 * t * cos_integral, 2.0 * t * bound)
}

/// Asymptotic series for the sine-integral auxiliary functions f, g at
/// large x, with the magnitude of the first omitted term.
fn si_auxiliary(x: f64) -> (f64, f64, f64) {
    let inv2 = 1.0 / (x * x);
    let mut f = 0.0;
    let mut g = 0.0;
    let mut f_term = 1.0 / x;
    let mut g_term = inv2;
    let mut bound = 0.0;
    for k in 0..8 {
        f += f_term;
        g += g_term;
        let kf = (2 * k + 1) as f64 * (2 * k + 2) as f64;
        let kg = (2 * k + 2) as f64 * (2 * k + 3) as f64;
        let next_f = -f_term * kf * inv2;
        let next_g = -g_term * kg * inv2;
        bound = next_f.abs() + next_g.abs();
        if next_f.abs() >= f_term.abs() {
            break;
        }
        f_term = next_f;
        g_term = next_g;
    }
    (f, g, bound)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRate {
    pub matrix_element: Complex64,
    /// |M|²∫|kernel|²dδ at `t`: transition probability summed over the
    /// resonance shell.
    pub shell_probability: f64,
    /// shell_probability / t.
    pub rate: f64,
    /// 2π|M|².
    pub golden_rule_rate: f64,
}

/// Large-t slope of the shell-integrated transition probability for
/// spontaneous emission into `mode`.
pub fn decay_rate_per_mode(
    ctx: &CouplingContext,
    atom: &TwoLevelAtom,
    mode: &FieldMode,
    t_large: f64,
) -> Result<DecayRate> {
    if t_large * atom.delta_omega() < 10.0 {
        return Err(Error::InvalidArgument(format!(
            "golden-rule regime needs t·Δω >> 1, got {}",
            t_large * atom.delta_omega()
        )));
    }
    let m = emission_matrix_element(ctx, mode, 0, Process::Emission)?;
    let shell = golden_rule_check(t_large)?;
    let weight = m.norm_sqr();
    let shell_probability = weight * shell.integral;
    Ok(DecayRate {
        matrix_element: m,
        shell_probability,
        rate: shell_probability / t_large,
        golden_rule_rate: 2.0 * PI * weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Polarization;
    use proptest::prelude::*;

    #[test]
    fn kernel_edge_values() {
        assert_eq!(emission_kernel(2.0, 1.0, 0.0).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(absorption_kernel(2.0, 1.0, 0.0).unwrap().value, Complex64::new(0.0, 0.0));
        let res = emission_kernel(1.5, 1.5, 7.0).unwrap().value;
        assert_eq!(res, Complex64::new(7.0, 0.0));
        assert_eq!(absorption_kernel(1.5, 1.5, 7.0).unwrap().value, Complex64::new(7.0, 0.0));
        let t = 3.0;
        let full_cycle = emission_kernel(1.0 + 2.0 * PI / t, 1.0, t).unwrap().value;
        assert!(full_cycle.norm() < 1e-14);
        assert!(emission_kernel(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn kernel_matches_closed_form_away_from_resonance() {
        let (dw, wk, t) = (2.0, 1.0, 3.0);
        let nu: f64 = wk - dw;
        let direct = (Complex64::new(0.0, nu * t).exp() - 1.0) / Complex64::new(0.0, nu);
        let v = emission_kernel(dw, wk, t).unwrap().value;
        assert!((v - direct).norm() < 1e-14);
        let a = absorption_kernel(dw, wk, t).unwrap().value;
        assert_eq!(a, v.conj());
    }

    #[test]
    fn resonance_branch_is_continuous() {
        let t = 2.0;
        for d in [1e-6, 1e-8] {
            let k = absorption_kernel(1.0 + d, 1.0, t).unwrap();
            assert!((k.value.norm_sqr() - t * t).abs() < 1e-10);
            assert!((kernel_magnitude_sq(d, t) - t * t).abs() < 1e-10);
        }
        // just either side of the branch switch
        let below = kernel_magnitude_sq(0.999e-6 / t, t);
        let above = kernel_magnitude_sq(1.001e-6 / t, t);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn joint_amplitude_examples() {
        let m = Complex64::from_polar(0.3, 0.7);
        let j = joint_amplitude(m, 1.5, 1.0, 4.0).unwrap();
        let oracle = 0.09 * 4.0 * 1f64.sin().powi(2) / 0.25;
        assert!((j - oracle).abs() < 1e-14);
        assert!((j - 1.019_625_722).abs() < 1e-8);
        let direct = (m * emission_kernel(1.5, 1.0, 4.0).unwrap().value).norm_sqr();
        assert!((j - direct).abs() < 1e-14);
        assert!((joint_amplitude(m, 1.0, 1.0, 5.0).unwrap() - 0.09 * 25.0).abs() < 1e-14);
        assert_eq!(joint_amplitude(Complex64::new(0.0, 0.0), 1.0, 0.2, 5.0).unwrap(), 0.0);
    }

    fn ctx() -> CouplingContext {
        CouplingContext::new(0.3, 2.0, 5.0, Complex64::new(0.4, -0.1)).unwrap()
    }

    #[test]
    fn matrix_element_structure() {
        let mode = FieldMode::new([0.0, 0.0, 1.5], Polarization::First).unwrap();
        let c = ctx();
        let m = emission_matrix_element(&c, &mode, 0, Process::Emission).unwrap();
        let expected = -(0.3 / 2.0) * (1.0f64 / (2.0 * 1.5 * 5.0)).sqrt() * c.p_ba;
        assert!((m - expected).norm() < 1e-15);

        let m3 = emission_matrix_element(&c, &mode, 3, Process::Emission).unwrap();
        assert!((m3 - expected * 2.0).norm() < 1e-15);
        let a4 = emission_matrix_element(&c, &mode, 4, Process::Absorption).unwrap();
        assert!((a4 - expected * 2.0).norm() < 1e-15);

        assert_eq!(
            emission_matrix_element(&c, &mode, 0, Process::Absorption),
            Err(Error::EmptyMode)
        );

        let doubled = CouplingContext { volume: 10.0, ..c };
        let m_big = emission_matrix_element(&doubled, &mode, 0, Process::Emission).unwrap();
        assert!((m.norm() / m_big.norm() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn matrix_element_position_phase() {
        let mode = FieldMode::new([1.0, 0.0, 0.0], Polarization::First).unwrap();
        let c = ctx().at_position([0.5, 0.0, 0.0]);
        let at_origin = emission_matrix_element(&ctx(), &mode, 0, Process::Emission).unwrap();
        let shifted = emission_matrix_element(&c, &mode, 0, Process::Emission).unwrap();
        assert!((shifted - at_origin * Complex64::from_polar(1.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn invalid_coupling_and_atom() {
        assert!(CouplingContext::new(0.3, 0.0, 1.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(CouplingContext::new(0.3, 1.0, -1.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(TwoLevelAtom::new(2.0, 1.0).is_err());
        let atom = TwoLevelAtom::new(0.25, 1.5).unwrap();
        assert_eq!(atom.delta_omega(), 1.25);
        let c = CouplingContext::from_fine_structure(crate::FINE_STRUCTURE, 1.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((c.e * c.e - 4.0 * PI * crate::FINE_STRUCTURE).abs() < 1e-15);
    }

    /// Independent oracle: composite Simpson over [0, L] with L = 4000π/t
    /// (so cos(tL) = 1) plus the leading tail 2/L.
    fn simpson_oracle(t: f64) -> f64 {
        let l = 4000.0 * PI / t;
        let n = 4_000_000usize;
        let h = l / n as f64;
        let f = |d: f64| kernel_magnitude_sq(d, t);
        let mut s = f(0.0) + f(l);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        2.0 * (s * h / 3.0 + 2.0 / l)
    }

    #[test]
    fn golden_rule_against_simpson_oracle() {
        for t in [1.0, 50.0] {
            let r = golden_rule_check(t).unwrap();
            let oracle = simpson_oracle(t);
            assert!((oracle / (2.0 * PI * t) - 1.0).abs() < 1e-5, "oracle {oracle}");
            assert!((r.integral - oracle).abs() / oracle < 1e-5);
            assert!(r.rel_err < 1e-3);
        }
        let r50 = golden_rule_check(50.0).unwrap();
        assert!((r50.integral - 314.159).abs() < 0.314);
    }

    #[test]
    fn golden_rule_is_linear_in_t() {
        let a = golden_rule_check(5.0).unwrap().integral;
        let b = golden_rule_check(10.0).unwrap().integral;
        assert!((b / a - 2.0).abs() < 4e-3);
        assert!(golden_rule_check(0.0).is_err());
    }

    #[test]
    fn tail_series_matches_quadrature() {
        let t = 1.0;
        let l = 200.0;
        let (tail, bound) = kernel_tail(l, t);
        // Numerical tail over [L, L + 2π·20000] plus 2/upper.
        let upper = l + 2.0 * PI * 20000.0;
        let pts: Vec<f64> = (0..=20000).map(|j| l + 2.0 * PI * j as f64).collect();
        let num = integrate_with_breaks(|d| kernel_magnitude_sq(d, t), &pts, &QuadSettings::default()).unwrap();
        let oracle = num.value + 2.0 / upper;
        assert!((tail - oracle).abs() < 1e-9, "{tail} vs {oracle}");
        assert!(bound < 1e-12);
    }

    #[test]
    fn decay_rate_scaling() {
        let atom = TwoLevelAtom::new(0.0, 2.0).unwrap();
        let mode = FieldMode::new([2.0, 0.0, 0.0], Polarization::Second).unwrap();
        let c = ctx();
        let r1 = decay_rate_per_mode(&c, &atom, &mode, 50.0).unwrap();
        let r2 = decay_rate_per_mode(&c, &atom, &mode, 100.0).unwrap();
        assert!((r2.shell_probability / r1.shell_probability - 2.0).abs() < 0.02);
        assert!((r1.rate / r1.golden_rule_rate - 1.0).abs() < 1e-3);

        let doubled = CouplingContext { p_ba: c.p_ba * 2.0, ..c };
        let r4 = decay_rate_per_mode(&doubled, &atom, &mode, 50.0).unwrap();
        assert!((r4.rate / r1.rate - 4.0).abs() < 1e-12);

        let zero = CouplingContext { p_ba: Complex64::new(0.0, 0.0), ..c };
        assert_eq!(decay_rate_per_mode(&zero, &atom, &mode, 50.0).unwrap().rate, 0.0);
        assert!(decay_rate_per_mode(&c, &atom, &mode, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn conjugacy_and_born_identity(
            m_abs in 0.0f64..1.0, phase in -PI..PI,
            detuning in -10.0f64..10.0, omega_k in 0.1f64..5.0, t in 0.0f64..100.0
        ) {
            let dw = omega_k + detuning;
            let e = emission_kernel(dw, omega_k, t).unwrap().value;
            let a = absorption_kernel(dw, omega_k, t).unwrap().value;
            prop_assert_eq!(a, e.conj());
            let m = Complex64::from_polar(m_abs, phase);
            let j = joint_amplitude(m, dw, omega_k, t).unwrap();
            let direct = (m * e).norm_sqr();
            prop_assert!(j >= 0.0);
            prop_assert!((j - direct).abs() <= 1e-12 * j.max(1e-30));
        }
    }
}
