use std::collections::HashSet;

use num_complex::Complex64;

use crate::hilbert::{BasisLabel, FieldMode, StateVector, STRUCTURAL_TOL};
use crate::perturbation::{CouplingContext, TwoLevelAtom};
use crate::{Error, Result, FINE_STRUCTURE};

/// How absorbers reached by the offer wave decide to confirm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseModel {
    /// Every absorber with a nonzero offer component confirms.
    Always,
    /// Each such absorber confirms independently with probability `p`
    /// (per absorber, per trial).
    Bernoulli { p: f64 },
}

impl ResponseModel {
    /// Bernoulli response at the fine-structure constant.
    pub fn fine_structure() -> Self {
        ResponseModel::Bernoulli { p: FINE_STRUCTURE }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ResponseModel::Always => Ok(()),
            ResponseModel::Bernoulli { p } if (0.0..=1.0).contains(&p) => Ok(()),
            ResponseModel::Bernoulli { p } => Err(Error::Scenario(format!(
                "response probability must lie in [0, 1], got {p}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbsorberState {
    Ground,
    Excited,
}

/// A ground-state atom bound to one field mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Absorber {
    pub id: String,
    pub mode: FieldMode,
    pub state: AbsorberState,
}

impl Absorber {
    pub fn new(id: impl Into<String>, mode: FieldMode) -> Self {
        Self {
            id: id.into(),
            mode,
            state: AbsorberState::Ground,
        }
    }
}

/// Emitter, absorbers, offer wave and Monte Carlo controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    emitter: TwoLevelAtom,
    absorbers: Vec<Absorber>,
    offer: StateVector,
    response_model: ResponseModel,
    trials: u64,
    seed: u64,
    coupling: Option<CouplingContext>,
}

impl Scenario {
    /// `offer_amplitudes[i]` is the amplitude of the offer wave in absorber
    /// `i`'s mode and must be normalized to 1e-12.
    pub fn new(
        emitter: TwoLevelAtom,
        absorbers: Vec<Absorber>,
        offer_amplitudes: Vec<Complex64>,
        response_model: ResponseModel,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if absorbers.is_empty() {
            return Err(Error::Scenario("at least one absorber is required".into()));
        }
        if offer_amplitudes.len() != absorbers.len() {
            return Err(Error::Scenario(format!(
                "{} offer amplitudes for {} absorbers",
                offer_amplitudes.len(),
                absorbers.len()
            )));
        }
        let mut ids = HashSet::new();
        for (i, a) in absorbers.iter().enumerate() {
            if !ids.insert(a.id.as_str()) {
                return Err(Error::Scenario(format!("duplicate absorber id {:?}", a.id)));
            }
            if absorbers[..i]
                .iter()
                .any(|b| b.mode.k_vec() == a.mode.k_vec() && b.mode.polarization() == a.mode.polarization())
            {
                return Err(Error::Scenario(format!(
                    "absorber {:?} shares its field mode with an earlier absorber",
                    a.id
                )));
            }
        }
        response_model.validate()?;
        let offer = StateVector::new(offer_amplitudes, BasisLabel::Modes)?;
        let norm_sqr = offer.norm_sqr();
        if (norm_sqr - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let absorbers = absorbers
            .into_iter()
            .map(|a| Absorber {
                state: AbsorberState::Ground,
                ..a
            })
            .collect();
        Ok(Self {
            emitter,
            absorbers,
            offer,
            response_model,
            trials,
            seed,
            coupling: None,
        })
    }

    pub fn with_coupling(mut self, coupling: CouplingContext) -> Self {
        self.coupling = Some(coupling);
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn emitter(&self) -> &TwoLevelAtom {
        &self.emitter
    }

    pub fn absorbers(&self) -> &[Absorber] {
        &self.absorbers
    }

    /// The offer wave |Ψ⟩ over the absorber modes.
    pub fn offer(&self) -> &StateVector {
        &self.offer
    }

    pub fn response_model(&self) -> ResponseModel {
        self.response_model
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coupling(&self) -> Option<&CouplingContext> {
        self.coupling.as_ref()
    }

    /// |⟨kᵢ|Ψ⟩|² per absorber.
    pub fn born_weights(&self) -> Vec<f64> {
        self.offer.amplitudes().iter().map(|c| c.norm_sqr()).collect()
    }
}
