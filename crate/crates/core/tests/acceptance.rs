//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use txsim::hilbert::{
    coherent_state, photon_number_stats, BasisLabel, FieldComponent, FockSpace, ModeBasis,
    SpacetimePoint, StateVector,
};
use txsim::perturbation::{absorption_kernel, emission_kernel, golden_rule_check, joint_amplitude, TwoLevelAtom};
use txsim::propagators::{
    d_advanced, d_feynman, d_retarded, d_timesym, factorization_check, fitted_order,
    smeared_pairing, sokhotski_split, PairingKernel, PropagatorPoint, TestFunction,
};
use txsim::transactions::{
    chi_square_critical, fan_out, nonunitarity_trace, run_trials, Absorber, ResponseModel, Scenario,
};
use txsim::FINE_STRUCTURE;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(amplitudes: &[f64], model: ResponseModel, trials: u64, seed: u64) -> Scenario {
    let modes = ModeBasis::on_sphere(amplitudes.len(), 1.0).unwrap();
    let absorbers = modes
        .modes()
        .iter()
        .enumerate()
        .map(|(i, m)| Absorber::new(format!("G{}", i + 1), *m))
        .collect();
    let amps = amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    Scenario::new(TwoLevelAtom::new(0.0, 1.0).unwrap(), absorbers, amps, model, trials, seed).unwrap()
}

fn born_rule_frequencies() -> Outcome {
    let s = scenario(&[FRAC_1_SQRT_2, 0.5, 0.5], ResponseModel::Always, 100_000, 20240601);
    let weights: Vec<f64> = fan_out(&s).iter().map(|c| c.norm_sqr()).collect();
    let weights_ok = weights
        .iter()
        .zip([0.5, 0.25, 0.25])
        .all(|(w, e)| (w - e).abs() <= 1e-15);

    let start = Instant::now();
    let stats = run_trials(&s);
    let elapsed = start.elapsed();

    let n = 100_000f64;
    let mut bands_ok = true;
    let mut worst = 0.0f64;
    for c in &stats.counts {
        let w = c.born_weight;
        let band = 3.0 * (w * (1.0 - w) / n).sqrt();
        let dev = (c.empirical_freq - w).abs();
        worst = worst.max(dev / band);
        bands_ok &= dev <= band;
    }
    let chi_ok = stats.chi_square_dof == 2 && stats.chi_square < 13.82;
    let time_ok = elapsed < Duration::from_secs(5);
    outcome(
        weights_ok && bands_ok && chi_ok && time_ok,
        format!(
            "weights {weights:?}, worst deviation {worst:.3} bands, chi2 {:.4} (dof {}), {:.3}s",
            stats.chi_square,
            stats.chi_square_dof,
            elapsed.as_secs_f64()
        ),
    )
}

/// (|M|, δ, t, ω_k) grid shared by criteria 2 and 3.
fn kernel_grid() -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    (0..1000)
        .map(|_| {
            let m = 10f64.powf(rng.random_range(-4.0..2.0));
            let delta = rng.random_range(-50.0..50.0);
            let t = 10f64.powf(rng.random_range(-2.0..2.0));
            let omega_k = rng.random_range(0.1..10.0);
            (m, delta, t, omega_k)
        })
        .collect()
}

fn born_squaring_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (m, delta, t, omega_k) in kernel_grid() {
        let m_emit = Complex64::from_polar(m, delta);
        let delta_omega = omega_k + delta;
        let joint = joint_amplitude(m_emit, delta_omega, omega_k, t).unwrap();
        let direct = (m_emit * emission_kernel(delta_omega, omega_k, t).unwrap().value).norm_sqr();
        worst = worst.max((joint - direct).abs() / joint.max(1e-30));
    }
    outcome(worst <= 1e-12, format!("max relative deviation {worst:.3e} over 1000 tuples"))
}

fn ulps(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.signum() != b.signum() {
        return u64::MAX;
    }
    a.to_bits().abs_diff(b.to_bits())
}

fn kernel_conjugacy() -> Outcome {
    let mut worst = 0u64;
    for (_, delta, t, omega_k) in kernel_grid() {
        let delta_omega = omega_k + delta;
        let e = emission_kernel(delta_omega, omega_k, t).unwrap().value;
        let a = absorption_kernel(delta_omega, omega_k, t).unwrap().value;
        let c = e.conj();
        worst = worst.max(ulps(a.re, c.re)).max(ulps(a.im, c.im));
    }
    outcome(worst <= 1, format!("max ulp distance {worst}"))
}

fn golden_rule_limit() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [1.0, 10.0, 50.0] {
        let start = Instant::now();
        let r = golden_rule_check(t).unwrap();
        let elapsed = start.elapsed();
        let expected = 2.0 * PI * t;
        let rel = (r.integral - expected).abs() / expected;
        pass &= rel <= 1e-3 && elapsed < Duration::from_secs(1);
        parts.push(format!("t={t}: rel {rel:.2e} in {:.3}s", elapsed.as_secs_f64()));
    }
    outcome(pass, parts.join("; "))
}

fn factorization_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut point = || {
        SpacetimePoint::new(
            rng.random_range(-10.0..10.0),
            [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)],
        )
    };
    let mut worst = 0.0f64;
    for m in [1usize, 4, 16] {
        let space = FockSpace::one_photon(ModeBasis::on_sphere(m, 1.0).unwrap());
        for _ in 0..10 {
            let (x, y) = (point(), point());
            for comp in [FieldComponent::X, FieldComponent::Y, FieldComponent::Z] {
                let r = factorization_check(&space, &x, &y, 1.0, comp).unwrap();
                worst = worst.max(r.max_abs_deviation);
            }
        }
    }
    outcome(worst <= 1e-12, format!("max_abs_deviation {worst:.3e}"))
}

fn propagator_decompositions() -> Outcome {
    let mut timesym_exact = true;
    let mut reassembly_worst = 0.0f64;
    for k0 in [-3.0, -1.0, -0.5, 0.0, 0.3, 1.0, 2.0, 5.0] {
        for k_abs in [0.0, 0.5, 1.0, 2.0] {
            for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
                let p = PropagatorPoint::new(k0, k_abs, eps).unwrap();
                let mean = 0.5 * d_retarded(&p) + 0.5 * d_advanced(&p);
                timesym_exact &= d_timesym(&p) == mean;
                let f = d_feynman(&p);
                let diff = (sokhotski_split(&p).reassemble() - f).norm() / f.norm().max(1.0);
                reassembly_worst = reassembly_worst.max(diff);
            }
        }
    }

    let target = 1.0 / (2.0 * PI).sqrt();
    let g = TestFunction::gaussian(0.0, 1.0).unwrap();
    let epsilons = [1e-1, 1e-2, 1e-3, 1e-4];
    let values: Vec<f64> = epsilons
        .iter()
        .map(|&e| smeared_pairing(PairingKernel::Delta, &g, e).unwrap().value.re)
        .collect();
    let errors: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
    let order = fitted_order(&epsilons, &errors).unwrap();
    let converges = errors.windows(2).all(|w| w[1] < w[0]);

    outcome(
        timesym_exact && reassembly_worst <= 1e-15 && converges && order >= 1.9,
        format!(
            "timesym exact {timesym_exact}, reassembly {reassembly_worst:.2e}, \
             pairing values {values:.9?}, errors [{}], fitted order {order:.3} (need >= 1.9)",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn nonunitarity() -> Outcome {
    let s = scenario(&[FRAC_1_SQRT_2, 0.5, 0.5], ResponseModel::Always, 1, 3);
    let tr = nonunitarity_trace(&s, 0).unwrap();
    let purity = [tr.purity.0, tr.purity.1, tr.purity.2];
    let entropy = [tr.entropy.0, tr.entropy.1, tr.entropy.2];
    let ok = purity.iter().zip([1.0, 0.375, 1.0]).all(|(a, b)| (a - b).abs() <= 1e-12)
        && entropy.iter().zip([0.0, 1.5 * LN_2, 0.0]).all(|(a, b)| (a - b).abs() <= 1e-12);
    outcome(ok, format!("purity {purity:?}, entropy {entropy:?}"))
}

fn response_scale() -> Outcome {
    let n = 1000usize;
    let trials = 10_000u64;
    let amp = (1.0 / n as f64).sqrt();
    let s = scenario(&vec![amp; n], ResponseModel::Bernoulli { p: FINE_STRUCTURE }, trials, 137);
    let stats = run_trials(&s);

    let mean = n as f64 * FINE_STRUCTURE;
    let sigma_mean = (n as f64 * FINE_STRUCTURE * (1.0 - FINE_STRUCTURE)).sqrt() / (trials as f64).sqrt();
    let q = (1.0 - FINE_STRUCTURE).powi(n as i32);
    let sigma_q = (q * (1.0 - q) / trials as f64).sqrt();

    let mean_ok = (stats.mean_responders() - mean).abs() <= 3.0 * sigma_mean;
    let q_ok = (stats.no_event_fraction() - q).abs() <= 3.0 * sigma_q;
    let conserved = stats.counts.iter().map(|c| c.count).sum::<u64>() + stats.no_event_count == trials;
    outcome(
        mean_ok && q_ok && conserved,
        format!(
            "mean responders {:.4} (expect {mean:.10} ± {:.4}), no-event fraction {:.3e} (expect {q:.4e} ± {:.2e})",
            stats.mean_responders(),
            3.0 * sigma_mean,
            stats.no_event_fraction(),
            3.0 * sigma_q
        ),
    )
}

fn coherent_contrast() -> Outcome {
    let space = FockSpace::single_mode(32);
    let coh = photon_number_stats(&coherent_state(Complex64::new(2.0, 0.0), &space).unwrap()).unwrap();
    let fock = photon_number_stats(&StateVector::basis_state(33, 1, BasisLabel::FockNumber).unwrap()).unwrap();
    let ok = (coh.mean - 4.0).abs() <= 1e-6 && (coh.variance - 4.0).abs() <= 1e-6 && fock.variance == 0.0;
    outcome(
        ok,
        format!(
            "coherent <n> {:.12} Var {:.12}; Fock |1> Var {}",
            coh.mean, coh.variance, fock.variance
        ),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_txsim");
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/born_three.json");
    let scenario = scenario.to_str().unwrap();
    let runs: [&[&str]; 8] = [
        &["run-transactions", "--scenario", scenario],
        &["check-born", "--scenario", scenario],
        &["check-born", "--scenario", scenario, "--format", "csv"],
        &["propagator-table", "--k0", "-2,0,2", "--kabs", "0,1", "--eps", "0.1,0.001"],
        &["golden-rule", "--t", "1,10,50"],
        &["coherent-state", "--alpha-re", "2", "--nmax", "32"],
        &["factorization-check", "--seed", "4"],
        &["factorization-check", "--format", "csv"],
    ];
    let mut mismatched = Vec::new();
    for args in runs {
        let run = |threads: &str| {
            Command::new(bin)
                .args(args)
                .args(["--deterministic", "--threads", threads])
                .output()
                .expect("spawn txsim")
        };
        let (one, eight) = (run("1"), run("8"));
        if !one.status.success() || one.stdout != eight.stdout || one.stdout.is_empty() {
            mismatched.push(args[0]);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{} runs compared, mismatches {mismatched:?}", runs.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Born-rule frequency reproduction", born_rule_frequencies),
        ("Born-rule squaring identity", born_squaring_identity),
        ("Conjugacy of kernels", kernel_conjugacy),
        ("Golden-rule limit", golden_rule_limit),
        ("Factorization identity", factorization_identity),
        ("Propagator decompositions", propagator_decompositions),
        ("Non-unitarity trace", nonunitarity),
        ("Response-scale statistics", response_scale),
        ("Coherent-state contrast", coherent_contrast),
        ("Determinism", cli_determinism),
    ];
    let crit = chi_square_critical(2, 0.001).unwrap();
    println!("chi-square(2) critical value at p = 0.001: {crit:.6}");

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name}: {}", i + 1, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
