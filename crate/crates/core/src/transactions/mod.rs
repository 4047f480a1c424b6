//! Offer → confirmation → incipient mixture → collapse, and its seeded Monte
//! Carlo statistics.
//!
//! One trial: the emitter's offer wave |Ψ⟩ fans out into components
//! ⟨kᵢ|Ψ⟩, one per absorber mode. Absorbers reached by a nonzero component
//! confirm according to the response model. Confirmations form the mixture
//! Σ wᵢ|kᵢ⟩⟨kᵢ| with Born weights wᵢ = |⟨kᵢ|Ψ⟩|², renormalized over the
//! responders, and a single categorical draw actualizes one of them.
//!
//! Trial `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results
//! are independent of execution order and thread count.

mod pipeline;
mod scenario;
mod stats;

pub use pipeline::{
    collapse, fan_out, form_mixture, nonunitarity_trace, run_trial, sample_responses, trial_rng,
    ConfirmationSet, IncipientMixture, NonunitarityTrace, TransactionOutcome, TrialOutcome,
};
pub use scenario::{Absorber, AbsorberState, ResponseModel, Scenario};
pub use stats::{chi_square_critical, run_trials, run_trials_with_threads, OutcomeCount, TrialStats};
