use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AbsorberState, ResponseModel, Scenario};
use crate::hilbert::{
    inner_product, mixture_entropy, projector, purity, BasisLabel, DensityOperator, Operator,
    StateVector,
};
use crate::{Error, Result};

/// Per-trial generator: ChaCha8 keyed by the master seed, on stream
/// `trial_index`.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Offer-wave components ⟨kᵢ|Ψ⟩, one per absorber.
pub fn fan_out(scenario: &Scenario) -> Vec<Complex64> {
    let offer = scenario.offer();
    let dim = offer.dim();
    (0..dim)
        .map(|i| {
            // Indices are in range and dimensions agree by construction.
            let k = StateVector::basis_state(dim, i, BasisLabel::Modes).expect("basis index in range");
            inner_product(&k.dual(), offer).expect("matching dimensions")
        })
        .collect()
}

/// Absorbers that confirmed, with the offer component each received.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfirmationSet {
    /// Absorber indices, ascending.
    pub responders: Vec<usize>,
    pub component_amplitudes: Vec<Complex64>,
}

impl ConfirmationSet {
    pub fn is_empty(&self) -> bool {
        self.responders.is_empty()
    }

    pub fn len(&self) -> usize {
        self.responders.len()
    }

    /// Responder ids looked up in `scenario`.
    pub fn responder_ids<'a>(&self, scenario: &'a Scenario) -> Vec<&'a str> {
        self.responders
            .iter()
            .map(|&i| scenario.absorbers()[i].id.as_str())
            .collect()
    }
}

/// Draws which absorbers confirm. Zero components never respond.
pub fn sample_responses<R: Rng + ?Sized>(
    components: &[Complex64],
    model: ResponseModel,
    rng: &mut R,
) -> ConfirmationSet {
    let mut responders = Vec::new();
    let mut component_amplitudes = Vec::new();
    for (i, &c) in components.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let responds = match model {
            ResponseModel::Always => true,
            ResponseModel::Bernoulli { p } => rng.random_bool(p),
        };
        if responds {
            responders.push(i);
            component_amplitudes.push(c);
        }
    }
    ConfirmationSet {
        responders,
        component_amplitudes,
    }
}

/// Σ wᵢ|kᵢ⟩⟨kᵢ| over the responders.
#[derive(Debug, Clone, PartialEq)]
pub struct IncipientMixture {
    pub responders: Vec<usize>,
    /// Born weights over responders, summing to 1.
    pub weights: Vec<f64>,
    /// Set when the raw responder weights did not already sum to 1.
    pub renormalized: bool,
    dim: usize,
}

impl IncipientMixture {
    /// Dimension of the mode space the projectors act on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density_operator(&self) -> Result<DensityOperator> {
        let weighted: Vec<(usize, f64)> = self
            .responders
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect();
        DensityOperator::diagonal(self.dim, &weighted)
    }

    /// Tr(ρ²) = Σwᵢ² for orthogonal projectors.
    pub fn purity(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }
}

/// Builds the incipient mixture, or `None` when nobody confirmed (a
/// no-event trial). `dim` is the number of absorber modes.
pub fn form_mixture(confirmations: &ConfirmationSet, dim: usize) -> Option<IncipientMixture> {
    if confirmations.is_empty() {
        return None;
    }
    let raw: Vec<f64> = confirmations
        .component_amplitudes
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let total: f64 = raw.iter().sum();
    let renormalized = (total - 1.0).abs() > 1e-12;
    let weights = if renormalized {
        raw.iter().map(|w| w / total).collect()
    } else {
        raw
    };
    Some(IncipientMixture {
        responders: confirmations.responders.clone(),
        weights,
        renormalized,
        dim,
    })
}

/// An actualized transaction: one receiving absorber, every other
/// responder left in its ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionOutcome {
    /// Absorber index of the receiving absorber.
    pub winner: usize,
    pub winner_weight: f64,
    /// Post-trial state of every absorber.
    pub absorber_states: Vec<AbsorberState>,
    dim: usize,
}

impl TransactionOutcome {
    /// |k_m⟩⟨k_m| for the receiving absorber's mode.
    pub fn actualized_projector(&self) -> Result<Operator> {
        projector(&StateVector::basis_state(self.dim, self.winner, BasisLabel::Modes)?)
    }

    pub fn excited_count(&self) -> usize {
        self.absorber_states
            .iter()
            .filter(|s| **s == AbsorberState::Excited)
            .count()
    }
}

/// Categorical draw of a single winner with probability equal to its weight.
pub fn collapse<R: Rng + ?Sized>(mixture: &IncipientMixture, rng: &mut R) -> TransactionOutcome {
    let u: f64 = rng.random();
    let total: f64 = mixture.weights.iter().sum();
    let target = u * total;
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (slot, &w) in mixture.weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        cumulative += w;
        chosen = Some(slot);
        if target < cumulative {
            break;
        }
    }
    // A nonempty mixture always has a positive weight.
    let slot = chosen.expect("mixture has a positive weight");
    let winner = mixture.responders[slot];
    let mut absorber_states = vec![AbsorberState::Ground; mixture.dim];
    absorber_states[winner] = AbsorberState::Excited;
    TransactionOutcome {
        winner,
        winner_weight: mixture.weights[slot],
        absorber_states,
        dim: mixture.dim,
    }
}

/// Everything one trial produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub confirmations: ConfirmationSet,
    pub mixture: Option<IncipientMixture>,
    pub outcome: Option<TransactionOutcome>,
}

/// Runs trial `trial_index` of `scenario` given its precomputed fan-out.
pub fn run_trial(scenario: &Scenario, components: &[Complex64], trial_index: u64) -> TrialOutcome {
    let mut rng = trial_rng(scenario.seed(), trial_index);
    let confirmations = sample_responses(components, scenario.response_model(), &mut rng);
    let mixture = form_mixture(&confirmations, components.len());
    let outcome = mixture.as_ref().map(|m| collapse(m, &mut rng));
    TrialOutcome {
        confirmations,
        mixture,
        outcome,
    }
}

/// Purity and entropy of the offer wave, the incipient mixture and the
/// actualized projector for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct NonunitarityTrace {
    pub trial: u64,
    /// (before, mixture, after)
    pub purity: (f64, f64, f64),
    pub entropy: (f64, f64, f64),
    pub responders: usize,
    pub winner: Option<usize>,
    pub renormalized: bool,
    /// Fewer than two responders: no mixing occurred.
    pub degenerate: bool,
}

pub fn nonunitarity_trace(scenario: &Scenario, trial: u64) -> Result<NonunitarityTrace> {
    if trial >= scenario.trials().max(1) {
        return Err(Error::InvalidArgument(format!(
            "trial {trial} out of range for {} trials",
            scenario.trials()
        )));
    }
    let before = DensityOperator::new(projector(scenario.offer())?)?;
    let components = fan_out(scenario);
    let result = run_trial(scenario, &components, trial);
    let responders = result.confirmations.len();

    let (p_before, s_before) = (purity(&before), mixture_entropy(&before));
    let (mixture, after) = match (&result.mixture, &result.outcome) {
        (Some(m), Some(o)) => {
            let rho = m.density_operator()?;
            let actual = DensityOperator::new(o.actualized_projector()?)?;
            ((purity(&rho), mixture_entropy(&rho)), (purity(&actual), mixture_entropy(&actual)))
        }
        // No event: the offer is never converted, report the pure state throughout.
        _ => ((p_before, s_before), (p_before, s_before)),
    };
    Ok(NonunitarityTrace {
        trial,
        purity: (p_before, mixture.0, after.0),
        entropy: (s_before, mixture.1, after.1),
        responders,
        winner: result.outcome.as_ref().map(|o| o.winner),
        renormalized: result.mixture.as_ref().is_some_and(|m| m.renormalized),
        degenerate: responders < 2,
    })
}
