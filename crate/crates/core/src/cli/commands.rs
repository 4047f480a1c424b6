use std::io::Read;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::document::{parse_scenario, ScenarioDocument};
use super::output::{to_json, to_json_compact, Cell, Table};
use super::{
    CliError, CoherentArgs, Command, Emitted, FactorizationArgs, Format, GoldenRuleArgs,
    PropagatorArgs, ScenarioArgs,
};
use crate::hilbert::{
    coherent_state, photon_number_stats, poisson_tail_mass, BasisLabel, FieldComponent, FockSpace,
    ModeBasis, SpacetimePoint, StateVector,
};
use crate::perturbation::golden_rule_check;
use crate::propagators::{
    d_advanced, d_feynman, d_retarded, d_timesym, factorization_check, sokhotski_split,
    PropagatorPoint,
};
use crate::transactions::{
    chi_square_critical, nonunitarity_trace, run_trials, run_trials_with_threads, Scenario,
    TrialStats,
};
use crate::VERSION;

/// Significance level of the reported chi-square critical value.
const BORN_SIGNIFICANCE: f64 = 0.001;
/// Pass threshold of the factorization identity.
const FACTORIZATION_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct ResultDocument<'a, I: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    inputs: &'a I,
    seed: Option<u64>,
    warnings: &'a [String],
    results: &'a R,
}

struct Report<'a, I: Serialize, R: Serialize> {
    subcommand: &'static str,
    inputs: I,
    seed: Option<u64>,
    warnings: &'a [String],
    results: R,
    table: Table,
}

pub(super) fn run(cli: &super::Cli) -> Result<Emitted, CliError> {
    let ctx = Ctx {
        format: cli.format,
        deterministic: cli.deterministic,
        threads: cli.threads,
    };
    match &cli.command {
        Command::RunTransactions(a) => run_transactions(&ctx, a),
        Command::CheckBorn(a) => check_born(&ctx, a),
        Command::PropagatorTable(a) => propagator_table(&ctx, a),
        Command::GoldenRule(a) => golden_rule(&ctx, a),
        Command::CoherentState(a) => coherent(&ctx, a),
        Command::FactorizationCheck(a) => factorization(&ctx, a),
    }
}

struct Ctx {
    format: Format,
    deterministic: bool,
    threads: Option<usize>,
}

impl Ctx {
    fn emit<I: Serialize, R: Serialize>(&self, report: Report<'_, I, R>) -> Emitted {
        let timestamp = if self.deterministic {
            None
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
        };
        let body = match self.format {
            Format::Json => to_json(&ResultDocument {
                tool: "txsim",
                version: VERSION,
                subcommand: report.subcommand,
                timestamp,
                inputs: &report.inputs,
                seed: report.seed,
                warnings: report.warnings,
                results: &report.results,
            }),
            Format::Csv => {
                let mut head = format!("# txsim {VERSION} {}\n", report.subcommand);
                if let Some(ts) = timestamp {
                    head.push_str(&format!("# timestamp: {ts}\n"));
                }
                let inputs = to_json_compact(&report.inputs);
                head.push_str(&format!("# inputs: {inputs}\n"));
                if let Some(seed) = report.seed {
                    head.push_str(&format!("# seed: {seed}\n"));
                }
                for w in report.warnings {
                    head.push_str(&format!("# warning: {w}\n"));
                }
                head + &report.table.to_csv()
            }
        };
        Emitted {
            body,
            format: self.format,
        }
    }

    fn trials(&self, scenario: &Scenario) -> Result<TrialStats, CliError> {
        match self.threads {
            Some(n) => run_trials_with_threads(scenario, n).map_err(CliError::from),
            None => Ok(run_trials(scenario)),
        }
    }
}

fn load_scenario(path: &Path) -> Result<super::ParsedScenario, CliError> {
    let bytes = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::new("io", format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| {
            CliError::new("io", format!("cannot read {}: {e}", path.display()))
                .with("path", path.display().to_string())
        })?
    };
    parse_scenario(&bytes)
}

#[derive(Serialize)]
struct ScenarioInputs {
    scenario: ScenarioDocument,
}

#[derive(Serialize)]
struct CountRow<'a> {
    id: &'a str,
    count: u64,
    born_weight: f64,
    empirical_freq: f64,
}

#[derive(Serialize)]
struct TraceResult {
    trial: u64,
    purity: [f64; 3],
    entropy: [f64; 3],
    responders: usize,
    winner: Option<String>,
    renormalized: bool,
    degenerate: bool,
}

#[derive(Serialize)]
struct RunResults<'a> {
    trials: u64,
    counts: Vec<CountRow<'a>>,
    no_event_count: u64,
    no_event_fraction: f64,
    mean_responders: f64,
    chi_square: f64,
    chi_square_dof: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<TraceResult>,
}

fn run_transactions(ctx: &Ctx, args: &ScenarioArgs) -> Result<Emitted, CliError> {
    let parsed = load_scenario(&args.scenario)?;
    let s = &parsed.scenario;
    let stats = ctx.trials(s)?;
    let trace = if s.trials() > 0 {
        let tr = nonunitarity_trace(s, args.trace_trial)?;
        Some(TraceResult {
            trial: tr.trial,
            purity: [tr.purity.0, tr.purity.1, tr.purity.2],
            entropy: [tr.entropy.0, tr.entropy.1, tr.entropy.2],
            responders: tr.responders,
            winner: tr.winner.map(|i| s.absorbers()[i].id.clone()),
            renormalized: tr.renormalized,
            degenerate: tr.degenerate,
        })
    } else {
        None
    };

    let mut table = Table::new(&["id", "count", "born_weight", "empirical_freq"]);
    for c in &stats.counts {
        table.push(vec![c.id.as_str().into(), c.count.into(), c.born_weight.into(), c.empirical_freq.into()]);
    }
    let results = RunResults {
        trials: stats.trials,
        counts: stats
            .counts
            .iter()
            .map(|c| CountRow {
                id: &c.id,
                count: c.count,
                born_weight: c.born_weight,
                empirical_freq: c.empirical_freq,
            })
            .collect(),
        no_event_count: stats.no_event_count,
        no_event_fraction: stats.no_event_fraction(),
        mean_responders: stats.mean_responders(),
        chi_square: stats.chi_square,
        chi_square_dof: stats.chi_square_dof,
        trace,
    };
    Ok(ctx.emit(Report {
        subcommand: "run-transactions",
        inputs: ScenarioInputs {
            scenario: ScenarioDocument::from_scenario(s),
        },
        seed: Some(stats.seed_used),
        warnings: &parsed.warnings,
        results,
        table,
    }))
}

#[derive(Serialize)]
struct BornRow<'a> {
    id: &'a str,
    born_weight: f64,
    count: u64,
    /// count / eventful trials
    frequency: f64,
    /// 3√(w(1−w)/n)
    band: f64,
    within_band: bool,
}

#[derive(Serialize)]
struct BornResults<'a> {
    trials: u64,
    eventful_trials: u64,
    modes: Vec<BornRow<'a>>,
    chi_square: f64,
    chi_square_dof: usize,
    significance: f64,
    chi_square_critical: Option<f64>,
    pass: bool,
}

fn check_born(ctx: &Ctx, args: &ScenarioArgs) -> Result<Emitted, CliError> {
    let parsed = load_scenario(&args.scenario)?;
    let s = &parsed.scenario;
    let stats = ctx.trials(s)?;
    let n = stats.eventful_trials();

    let modes: Vec<BornRow> = stats
        .counts
        .iter()
        .map(|c| {
            let w = c.born_weight;
            let (frequency, band) = if n == 0 {
                (0.0, 0.0)
            } else {
                (c.count as f64 / n as f64, 3.0 * (w * (1.0 - w) / n as f64).sqrt())
            };
            BornRow {
                id: &c.id,
                born_weight: w,
                count: c.count,
                frequency,
                band,
                within_band: (frequency - w).abs() <= band,
            }
        })
        .collect();
    let critical = if stats.chi_square_dof > 0 {
        Some(chi_square_critical(stats.chi_square_dof, BORN_SIGNIFICANCE)?)
    } else {
        None
    };
    let pass = n > 0 && modes.iter().all(|m| m.within_band) && critical.is_none_or(|c| stats.chi_square < c);

    let mut table = Table::new(&["id", "born_weight", "count", "frequency", "band", "within_band"]);
    for m in &modes {
        table.push(vec![
            m.id.into(),
            m.born_weight.into(),
            m.count.into(),
            m.frequency.into(),
            m.band.into(),
            m.within_band.to_string().into(),
        ]);
    }
    let results = BornResults {
        trials: stats.trials,
        eventful_trials: n,
        modes,
        chi_square: stats.chi_square,
        chi_square_dof: stats.chi_square_dof,
        significance: BORN_SIGNIFICANCE,
        chi_square_critical: critical,
        pass,
    };
    Ok(ctx.emit(Report {
        subcommand: "check-born",
        inputs: ScenarioInputs {
            scenario: ScenarioDocument::from_scenario(s),
        },
        seed: Some(stats.seed_used),
        warnings: &parsed.warnings,
        results,
        table,
    }))
}

#[derive(Serialize)]
struct PropagatorInputs<'a> {
    k0: &'a [f64],
    kabs: &'a [f64],
    eps: &'a [f64],
}

#[derive(Serialize)]
struct PropagatorRow {
    k0: f64,
    k_abs: f64,
    eps: f64,
    k_sq: f64,
    d_feynman: [f64; 2],
    d_retarded: [f64; 2],
    d_advanced: [f64; 2],
    d_timesym: [f64; 2],
    principal: f64,
    delta: f64,
}

fn parts(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn propagator_table(ctx: &Ctx, args: &PropagatorArgs) -> Result<Emitted, CliError> {
    let mut rows = Vec::new();
    let mut table = Table::new(&[
        "k0", "k_abs", "eps", "k_sq", "d_feynman_re", "d_feynman_im", "d_retarded_re", "d_retarded_im",
        "d_advanced_re", "d_advanced_im", "d_timesym_re", "d_timesym_im", "principal", "delta",
    ]);
    for &k0 in &args.k0 {
        for &k_abs in &args.kabs {
            for &eps in &args.eps {
                let p = PropagatorPoint::new(k0, k_abs, eps)?;
                let split = sokhotski_split(&p);
                let row = PropagatorRow {
                    k0,
                    k_abs,
                    eps,
                    k_sq: p.k_sq(),
                    d_feynman: parts(d_feynman(&p)),
                    d_retarded: parts(d_retarded(&p)),
                    d_advanced: parts(d_advanced(&p)),
                    d_timesym: parts(d_timesym(&p)),
                    principal: split.principal,
                    delta: split.delta,
                };
                let mut cells: Vec<Cell> = vec![k0.into(), k_abs.into(), eps.into(), row.k_sq.into()];
                for z in [row.d_feynman, row.d_retarded, row.d_advanced, row.d_timesym] {
                    cells.push(z[0].into());
                    cells.push(z[1].into());
                }
                cells.push(row.principal.into());
                cells.push(row.delta.into());
                table.push(cells);
                rows.push(row);
            }
        }
    }
    Ok(ctx.emit(Report {
        subcommand: "propagator-table",
        inputs: PropagatorInputs {
            k0: &args.k0,
            kabs: &args.kabs,
            eps: &args.eps,
        },
        seed: None,
        warnings: &[],
        results: rows,
        table,
    }))
}

#[derive(Serialize)]
struct GoldenInputs<'a> {
    t: &'a [f64],
}

#[derive(Serialize)]
struct GoldenRow {
    t: f64,
    integral: f64,
    expected: f64,
    rel_err: f64,
    tail: f64,
    error_estimate: f64,
}

fn golden_rule(ctx: &Ctx, args: &GoldenRuleArgs) -> Result<Emitted, CliError> {
    let mut rows = Vec::new();
    let mut table = Table::new(&["t", "integral", "expected", "rel_err", "tail", "error_estimate"]);
    for &t in &args.t {
        let r = golden_rule_check(t)?;
        table.push(vec![t.into(), r.integral.into(), r.expected.into(), r.rel_err.into(), r.tail.into(), r.error_estimate.into()]);
        rows.push(GoldenRow {
            t,
            integral: r.integral,
            expected: r.expected,
            rel_err: r.rel_err,
            tail: r.tail,
            error_estimate: r.error_estimate,
        });
    }
    Ok(ctx.emit(Report {
        subcommand: "golden-rule",
        inputs: GoldenInputs { t: &args.t },
        seed: None,
        warnings: &[],
        results: rows,
        table,
    }))
}

#[derive(Serialize)]
struct CoherentInputs {
    alpha: [f64; 2],
    n_max: usize,
}

#[derive(Serialize)]
struct FockContrast {
    n: usize,
    mean: f64,
    variance: f64,
}

#[derive(Serialize)]
struct CoherentResults {
    mean: f64,
    variance: f64,
    /// |α|², the untruncated Poisson mean and variance
    poisson_mean: f64,
    truncated_tail_mass: f64,
    distribution: Vec<f64>,
    fock_contrast: FockContrast,
}

fn coherent(ctx: &Ctx, args: &CoherentArgs) -> Result<Emitted, CliError> {
    if args.nmax == 0 {
        return Err(CliError::new("invalid_argument", "--nmax must be at least 1").with("nmax", 0));
    }
    let alpha = Complex64::new(args.alpha_re, args.alpha_im);
    let space = FockSpace::single_mode(args.nmax);
    let stats = photon_number_stats(&coherent_state(alpha, &space)?)?;
    let fock = photon_number_stats(&StateVector::basis_state(space.dim(), 1, BasisLabel::FockNumber)?)?;
    let mean = alpha.norm_sqr();

    let mut table = Table::new(&["n", "probability", "poisson"]);
    let mut log_p = -mean;
    for (n, &p) in stats.distribution.iter().enumerate() {
        if n > 0 {
            log_p += mean.ln() - (n as f64).ln();
        }
        let poisson = if mean == 0.0 { if n == 0 { 1.0 } else { 0.0 } } else { log_p.exp() };
        table.push(vec![n.into(), p.into(), poisson.into()]);
    }
    let results = CoherentResults {
        mean: stats.mean,
        variance: stats.variance,
        poisson_mean: mean,
        truncated_tail_mass: poisson_tail_mass(mean, args.nmax),
        distribution: stats.distribution,
        fock_contrast: FockContrast {
            n: 1,
            mean: fock.mean,
            variance: fock.variance,
        },
    };
    Ok(ctx.emit(Report {
        subcommand: "coherent-state",
        inputs: CoherentInputs {
            alpha: [alpha.re, alpha.im],
            n_max: args.nmax,
        },
        seed: None,
        warnings: &[],
        results,
        table,
    }))
}

#[derive(Serialize)]
struct FactorizationInputs<'a> {
    modes: &'a [usize],
    pairs: usize,
    volume: f64,
}

#[derive(Serialize)]
struct FactorizationRow {
    modes: usize,
    pair: usize,
    component: &'static str,
    x: [f64; 4],
    y: [f64; 4],
    direct: [f64; 2],
    mode_sum: [f64; 2],
    deviation: f64,
}

#[derive(Serialize)]
struct FactorizationResults {
    max_abs_deviation: f64,
    tolerance: f64,
    pass: bool,
    rows: Vec<FactorizationRow>,
}

fn random_point(rng: &mut ChaCha8Rng) -> SpacetimePoint {
    let mut c = || rng.random_range(-10.0..10.0);
    SpacetimePoint::new(c(), [c(), c(), c()])
}

fn factorization(ctx: &Ctx, args: &FactorizationArgs) -> Result<Emitted, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    let mut table = Table::new(&[
        "modes", "pair", "component", "direct_re", "direct_im", "mode_sum_re", "mode_sum_im", "deviation",
    ]);
    for &m in &args.modes {
        let space = FockSpace::one_photon(ModeBasis::on_sphere(m, 1.0)?);
        for pair in 0..args.pairs {
            let x = random_point(&mut rng);
            let y = random_point(&mut rng);
            for (component, name) in [(FieldComponent::X, "x"), (FieldComponent::Y, "y"), (FieldComponent::Z, "z")] {
                let r = factorization_check(&space, &x, &y, args.volume, component)?;
                table.push(vec![
                    m.into(),
                    pair.into(),
                    name.into(),
                    r.direct_value.re.into(),
                    r.direct_value.im.into(),
                    r.mode_sum_value.re.into(),
                    r.mode_sum_value.im.into(),
                    r.max_abs_deviation.into(),
                ]);
                rows.push(FactorizationRow {
                    modes: m,
                    pair,
                    component: name,
                    x: [x.t, x.x[0], x.x[1], x.x[2]],
                    y: [y.t, y.x[0], y.x[1], y.x[2]],
                    direct: parts(r.direct_value),
                    mode_sum: parts(r.mode_sum_value),
                    deviation: r.max_abs_deviation,
                });
            }
        }
    }
    let max_abs_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let results = FactorizationResults {
        max_abs_deviation,
        tolerance: FACTORIZATION_TOL,
        pass: max_abs_deviation <= FACTORIZATION_TOL,
        rows,
    };
    Ok(ctx.emit(Report {
        subcommand: "factorization-check",
        inputs: FactorizationInputs {
            modes: &args.modes,
            pairs: args.pairs,
            volume: args.volume,
        },
        seed: Some(args.seed),
        warnings: &[],
        results,
        table,
    }))
}
