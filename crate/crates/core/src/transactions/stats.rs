use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::pipeline::{fan_out, run_trial};
use super::Scenario;
use crate::{Error, Result};

/// Expected counts below this are left out of the chi-square sum.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeCount {
    pub id: String,
    pub count: u64,
    pub born_weight: f64,
    pub empirical_freq: f64,
}

/// Aggregated Monte Carlo results. Bitwise identical for identical
/// (scenario, seed), whatever the thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trials: u64,
    pub counts: Vec<OutcomeCount>,
    pub no_event_count: u64,
    /// Confirmations summed over all trials.
    pub responder_total: u64,
    /// Σ(obs − exp)²/exp with exp = wᵢ·(eventful trials), over bins with exp ≥ 5.
    pub chi_square: f64,
    /// Bins used minus one (0 when fewer than two bins qualify).
    pub chi_square_dof: usize,
    pub seed_used: u64,
}

impl TrialStats {
    pub fn mean_responders(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.responder_total as f64 / self.trials as f64
        }
    }

    pub fn no_event_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.no_event_count as f64 / self.trials as f64
        }
    }

    pub fn eventful_trials(&self) -> u64 {
        self.trials - self.no_event_count
    }
}

#[derive(Clone)]
struct Tally {
    wins: Vec<u64>,
    no_event: u64,
    responders: u64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            wins: vec![0; n],
            no_event: 0,
            responders: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.wins.iter_mut().zip(other.wins) {
            *a += b;
        }
        self.no_event += other.no_event;
        self.responders += other.responders;
        self
    }
}

/// Runs every trial of `scenario` on the global rayon pool.
pub fn run_trials(scenario: &Scenario) -> TrialStats {
    let components = fan_out(scenario);
    let n = components.len();
    let tally = (0..scenario.trials())
        .into_par_iter()
        .fold(
            || Tally::new(n),
            |mut t, i| {
                let r = run_trial(scenario, &components, i);
                t.responders += r.confirmations.len() as u64;
                match r.outcome {
                    Some(o) => t.wins[o.winner] += 1,
                    None => t.no_event += 1,
                }
                t
            },
        )
        .reduce(|| Tally::new(n), Tally::merge);
    summarize(scenario, tally)
}

/// Runs on a dedicated pool of `threads` workers.
pub fn run_trials_with_threads(scenario: &Scenario, threads: usize) -> Result<TrialStats> {
    if threads == 0 {
        return Err(Error::InvalidArgument("thread count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(|| run_trials(scenario)))
}

fn summarize(scenario: &Scenario, tally: Tally) -> TrialStats {
    let trials = scenario.trials();
    let weights = scenario.born_weights();
    let eventful = (trials - tally.no_event) as f64;

    let mut chi_square = 0.0;
    let mut bins = 0usize;
    for (&obs, &w) in tally.wins.iter().zip(&weights) {
        let expected = w * eventful;
        if expected >= MIN_EXPECTED {
            let d = obs as f64 - expected;
            chi_square += d * d / expected;
            bins += 1;
        }
    }

    let counts = scenario
        .absorbers()
        .iter()
        .zip(tally.wins.iter().zip(&weights))
        .map(|(a, (&count, &born_weight))| OutcomeCount {
            id: a.id.clone(),
            count,
            born_weight,
            empirical_freq: if trials == 0 { 0.0 } else { count as f64 / trials as f64 },
        })
        .collect();

    TrialStats {
        trials,
        counts,
        no_event_count: tally.no_event,
        responder_total: tally.responders,
        chi_square,
        chi_square_dof: bins.saturating_sub(1),
        seed_used: scenario.seed(),
    }
}

/// Upper critical value: P(χ²_dof > x) = p.
pub fn chi_square_critical(dof: usize, p: f64) -> Result<f64> {
    if dof == 0 || !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "chi-square critical value needs dof > 0 and 0 < p < 1, got dof={dof}, p={p}"
        )));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.inverse_cdf(1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ModeBasis;
    use crate::perturbation::TwoLevelAtom;
    use crate::transactions::{Absorber, ResponseModel};
    use crate::FINE_STRUCTURE;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn born_scenario(trials: u64, seed: u64) -> Scenario {
        let modes = ModeBasis::on_sphere(3, 1.0).unwrap();
        let absorbers = modes
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| Absorber::new(format!("G{}", i + 1), *m))
            .collect();
        let amps = [FRAC_1_SQRT_2, 0.5, 0.5].map(|a| Complex64::new(a, 0.0)).to_vec();
        Scenario::new(TwoLevelAtom::new(0.0, 1.0).unwrap(), absorbers, amps, ResponseModel::Always, trials, seed)
            .unwrap()
    }

    #[test]
    fn zero_trials_is_empty() {
        let s = run_trials(&born_scenario(0, 1));
        assert_eq!(s.trials, 0);
        assert_eq!(s.no_event_count, 0);
        assert!(s.counts.iter().all(|c| c.count == 0 && c.empirical_freq == 0.0));
        assert_eq!(s.chi_square, 0.0);
    }

    #[test]
    fn chi_square_below_critical() {
        let s = run_trials(&born_scenario(100_000, 42));
        assert_eq!(s.chi_square_dof, 2);
        let crit = chi_square_critical(2, 0.001).unwrap();
        assert!((crit - 13.815510557964274).abs() < 1e-9);
        assert!(s.chi_square < crit, "{}", s.chi_square);
        assert_eq!(s.counts.iter().map(|c| c.count).sum::<u64>(), 100_000);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let scenario = born_scenario(20_000, 9);
        let one = run_trials_with_threads(&scenario, 1).unwrap();
        let eight = run_trials_with_threads(&scenario, 8).unwrap();
        assert_eq!(one, eight);
        assert_eq!(one.chi_square.to_bits(), eight.chi_square.to_bits());
        assert!(run_trials_with_threads(&scenario, 0).is_err());
    }

    #[test]
    fn bernoulli_mean_responders() {
        let modes = ModeBasis::on_sphere(1000, 1.0).unwrap();
        let absorbers = modes
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| Absorber::new(format!("A{i}"), *m))
            .collect();
        let amp = Complex64::new((1.0f64 / 1000.0).sqrt(), 0.0);
        let scenario = Scenario::new(
            TwoLevelAtom::new(0.0, 1.0).unwrap(),
            absorbers,
            vec![amp; 1000],
            ResponseModel::fine_structure(),
            10_000,
            5,
        )
        .unwrap();
        let s = run_trials(&scenario);
        let mean = 1000.0 * FINE_STRUCTURE;
        let sigma = (1000.0 * FINE_STRUCTURE * (1.0 - FINE_STRUCTURE) / 10_000.0).sqrt();
        assert!((s.mean_responders() - mean).abs() <= 3.0 * sigma);
        assert_eq!(s.counts.iter().map(|c| c.count).sum::<u64>() + s.no_event_count, 10_000);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn trials_are_conserved(seed in any::<u64>(), trials in 0u64..500, p in 0.0f64..=1.0) {
            let s = born_scenario(trials, seed);
            let amps = s.offer().amplitudes().to_vec();
            let s = Scenario::new(*s.emitter(), s.absorbers().to_vec(), amps, ResponseModel::Bernoulli { p }, trials, seed).unwrap();
            let stats = run_trials(&s);
            prop_assert_eq!(stats.counts.iter().map(|c| c.count).sum::<u64>() + stats.no_event_count, trials);
            prop_assert_eq!(stats.seed_used, seed);
        }
    }
}
