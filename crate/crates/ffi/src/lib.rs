//! C ABI for txsim.
//!
//! Conventions:
//! - every fallible function returns a `TxStatus`; results go through out
//!   pointers, which are left untouched on failure;
//! - `tx_last_error_message` describes the most recent failure on the
//!   calling thread;
//! - handles (`TxScenario`, `TxTrialStats`) and strings returned by the
//!   library are owned by the caller and released with the matching
//!   `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use txsim::cli::{parse_scenario, to_json, CliError, ScenarioDocument};
use txsim::hilbert::{coherent_state, photon_number_stats, FockSpace};
use txsim::perturbation::{absorption_kernel, emission_kernel, golden_rule_check, joint_amplitude};
use txsim::propagators::{d_advanced, d_feynman, d_retarded, d_timesym, PropagatorPoint};
use txsim::transactions::{run_trials, run_trials_with_threads, Scenario, TrialStats};
use txsim::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    JsonParse = 3,
    Schema = 4,
    NotNormalized = 5,
    InvalidScenario = 6,
    InvalidArgument = 7,
    DimensionMismatch = 8,
    Truncation = 9,
    EmptyMode = 10,
    Quadrature = 11,
    OutOfRange = 12,
    Internal = 99,
}

impl TxStatus {
    fn from_code(code: &str) -> Self {
        match code {
            "invalid_utf8" => TxStatus::InvalidUtf8,
            "json_parse" => TxStatus::JsonParse,
            "schema" => TxStatus::Schema,
            "not_normalized" => TxStatus::NotNormalized,
            "invalid_scenario" => TxStatus::InvalidScenario,
            "invalid_argument" | "invalid_density" | "mode_basis_mismatch" => TxStatus::InvalidArgument,
            "dimension_mismatch" => TxStatus::DimensionMismatch,
            "truncation" => TxStatus::Truncation,
            "empty_mode" => TxStatus::EmptyMode,
            "quadrature" => TxStatus::Quadrature,
            _ => TxStatus::Internal,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for TxComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<TxComplex> for Complex64 {
    fn from(c: TxComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxGoldenRule {
    pub t: f64,
    pub integral: f64,
    pub expected: f64,
    pub rel_err: f64,
    pub error_estimate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPhotonStats {
    pub mean: f64,
    pub variance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxTrialSummary {
    pub trials: u64,
    pub no_event_count: u64,
    pub responder_total: u64,
    pub chi_square: f64,
    pub chi_square_dof: usize,
    pub seed_used: u64,
}

/// Opaque scenario handle.
pub struct TxScenario {
    inner: Scenario,
}

/// Opaque Monte Carlo result handle.
pub struct TxTrialStats {
    inner: TrialStats,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: TxStatus, message: &str) -> TxStatus {
    set_last_error(message);
    status
}

fn cli_fail(e: CliError) -> TxStatus {
    fail(TxStatus::from_code(&e.code), &e.message)
}

fn core_fail(e: txsim::Error) -> TxStatus {
    fail(TxStatus::from_code(e.code()), &e.to_string())
}

/// Runs `f`, converting panics into `TxStatus::Internal`.
fn guard<F: FnOnce() -> TxStatus>(f: F) -> TxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == TxStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(_) => fail(TxStatus::Internal, "internal panic"),
    }
}

/// Writes `value` through `out`, or reports a null pointer.
///
/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_out<T>(out: *mut T, value: T) -> TxStatus {
    if out.is_null() {
        return fail(TxStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    TxStatus::Ok
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tx_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failure on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn tx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a scenario JSON document (NUL-terminated UTF-8).
///
/// # Safety
/// `json` must be null or a valid NUL-terminated string; `out` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_from_json(json: *const c_char, out: *mut *mut TxScenario) -> TxStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(TxStatus::NullPointer, "null argument");
        }
        let bytes = CStr::from_ptr(json).to_bytes();
        match parse_scenario(bytes) {
            Ok(parsed) => write_out(out, Box::into_raw(Box::new(TxScenario { inner: parsed.scenario }))),
            Err(e) => cli_fail(e),
        }
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from `tx_scenario_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_free(s: *mut TxScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Canonical JSON echo of the scenario; free with `tx_string_free`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_to_json(s: *const TxScenario, out: *mut *mut c_char) -> TxStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(TxStatus::NullPointer, "null scenario");
        };
        let text = to_json(&ScenarioDocument::from_scenario(&s.inner));
        write_out(out, into_c_string(text))
    })
}

/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_absorber_count(s: *const TxScenario, out: *mut usize) -> TxStatus {
    guard(|| match s.as_ref() {
        Some(s) => write_out(out, s.inner.absorbers().len()),
        None => fail(TxStatus::NullPointer, "null scenario"),
    })
}

/// Born weight |⟨kᵢ|Ψ⟩|² of absorber `index`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_born_weight(s: *const TxScenario, index: usize, out: *mut f64) -> TxStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(TxStatus::NullPointer, "null scenario");
        };
        match s.inner.born_weights().get(index) {
            Some(&w) => write_out(out, w),
            None => fail(TxStatus::OutOfRange, &format!("absorber index {index} out of range")),
        }
    })
}

/// Overrides the trial count and master seed.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tx_scenario_set_trials(s: *mut TxScenario, trials: u64, seed: u64) -> TxStatus {
    guard(|| match s.as_mut() {
        Some(s) => {
            s.inner = s.inner.clone().with_trials(trials).with_seed(seed);
            TxStatus::Ok
        }
        None => fail(TxStatus::NullPointer, "null scenario"),
    })
}

/// Runs every trial. `threads == 0` uses the default pool. The result does
/// not depend on `threads`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_run_trials(s: *const TxScenario, threads: usize, out: *mut *mut TxTrialStats) -> TxStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(TxStatus::NullPointer, "null scenario");
        };
        if out.is_null() {
            return fail(TxStatus::NullPointer, "null output pointer");
        }
        let stats = if threads == 0 {
            run_trials(&s.inner)
        } else {
            match run_trials_with_threads(&s.inner, threads) {
                Ok(stats) => stats,
                Err(e) => return core_fail(e),
            }
        };
        write_out(out, Box::into_raw(Box::new(TxTrialStats { inner: stats })))
    })
}

/// Releases trial statistics. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from `tx_run_trials` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tx_trial_stats_free(s: *mut TxTrialStats) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_trial_stats_summary(s: *const TxTrialStats, out: *mut TxTrialSummary) -> TxStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(TxStatus::NullPointer, "null stats");
        };
        let st = &s.inner;
        write_out(
            out,
            TxTrialSummary {
                trials: st.trials,
                no_event_count: st.no_event_count,
                responder_total: st.responder_total,
                chi_square: st.chi_square,
                chi_square_dof: st.chi_square_dof,
                seed_used: st.seed_used,
            },
        )
    })
}

/// Number of trials actualized at absorber `index`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_trial_stats_count(s: *const TxTrialStats, index: usize, out: *mut u64) -> TxStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(TxStatus::NullPointer, "null stats");
        };
        match s.inner.counts.get(index) {
            Some(c) => write_out(out, c.count),
            None => fail(TxStatus::OutOfRange, &format!("absorber index {index} out of range")),
        }
    })
}

fn propagator(
    k0: f64,
    k_abs: f64,
    epsilon: f64,
    out: *mut TxComplex,
    f: fn(&PropagatorPoint) -> Complex64,
) -> TxStatus {
    guard(|| match PropagatorPoint::new(k0, k_abs, epsilon) {
        // SAFETY: callers pass through the C caller's out pointer.
        Ok(p) => unsafe { write_out(out, f(&p).into()) },
        Err(e) => core_fail(e),
    })
}

/// D_F = 1/(k² + iε), k² = k0² − |k|².
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_d_feynman(k0: f64, k_abs: f64, epsilon: f64, out: *mut TxComplex) -> TxStatus {
    propagator(k0, k_abs, epsilon, out, d_feynman)
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_d_retarded(k0: f64, k_abs: f64, epsilon: f64, out: *mut TxComplex) -> TxStatus {
    propagator(k0, k_abs, epsilon, out, d_retarded)
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_d_advanced(k0: f64, k_abs: f64, epsilon: f64, out: *mut TxComplex) -> TxStatus {
    propagator(k0, k_abs, epsilon, out, d_advanced)
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_d_timesym(k0: f64, k_abs: f64, epsilon: f64, out: *mut TxComplex) -> TxStatus {
    propagator(k0, k_abs, epsilon, out, d_timesym)
}

/// First-order emission time kernel.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_emission_kernel(delta_omega: f64, omega_k: f64, t: f64, out: *mut TxComplex) -> TxStatus {
    guard(|| match emission_kernel(delta_omega, omega_k, t) {
        Ok(k) => write_out(out, k.value.into()),
        Err(e) => core_fail(e),
    })
}

/// First-order absorption time kernel, the conjugate of the emission kernel.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_absorption_kernel(delta_omega: f64, omega_k: f64, t: f64, out: *mut TxComplex) -> TxStatus {
    guard(|| match absorption_kernel(delta_omega, omega_k, t) {
        Ok(k) => write_out(out, k.value.into()),
        Err(e) => core_fail(e),
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_joint_amplitude(
    m_emit: TxComplex,
    delta_omega: f64,
    omega_k: f64,
    t: f64,
    out: *mut f64,
) -> TxStatus {
    guard(|| match joint_amplitude(m_emit.into(), delta_omega, omega_k, t) {
        Ok(v) => write_out(out, v),
        Err(e) => core_fail(e),
    })
}

/// ∫|kernel(δ, t)|² dδ against 2πt.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_golden_rule(t: f64, out: *mut TxGoldenRule) -> TxStatus {
    guard(|| match golden_rule_check(t) {
        Ok(r) => write_out(
            out,
            TxGoldenRule {
                t: r.t,
                integral: r.integral,
                expected: r.expected,
                rel_err: r.rel_err,
                error_estimate: r.error_estimate,
            },
        ),
        Err(e) => core_fail(e),
    })
}

/// Photon-number mean and variance of the coherent state |α⟩ truncated at
/// `n_max`. Fails with `Truncation` when |α|² > n_max/4.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tx_coherent_stats(alpha: TxComplex, n_max: usize, out: *mut TxPhotonStats) -> TxStatus {
    guard(|| {
        let stats = coherent_state(alpha.into(), &FockSpace::single_mode(n_max)).and_then(|s| photon_number_stats(&s));
        match stats {
            Ok(s) => write_out(
                out,
                TxPhotonStats {
                    mean: s.mean,
                    variance: s.variance,
                },
            ),
            Err(e) => core_fail(e),
        }
    })
}
