//! Markov decision process around ensemble contracted eigensolver updates.
//!
//! An action picks one sign-free operator from the pool; its angle is
//! optimized in closed form and the rotation is applied to every ensemble
//! member. The state is the vector of weighted commutator residuals.

mod ensemble;
mod episode;
mod landscape;
mod pool;
pub mod search;
mod step;

pub use ensemble::{ensemble_energy, normalize_weights, EnsembleState};
pub use episode::{EnergyEnvironment, EpisodeTrace, FidelityEnvironment, TraceRow};
pub use landscape::{EnergyLandscape, FidelityLandscape};
pub use pool::{build_action_pool, ActionPool};
pub use step::{
    compute_rl_state, energy_mode_outcomes, energy_mode_rewards, fidelity_mode_rewards, optimize_fidelity,
    optimize_theta, step_energy_mode, step_fidelity_mode, EnvConfig, RLState, StepOutcome,
};

use thiserror::Error;

use crate::qubits::QubitError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("invalid action pool: {0}")]
    InvalidPool(String),
    #[error("action index {index} outside pool of size {size}")]
    InvalidActionIndex { index: usize, size: usize },
    #[error("register mismatch: pool has {pool} qubits, state has {state}")]
    RegisterMismatch { pool: usize, state: usize },
    #[error(transparent)]
    Qubit(#[from] QubitError),
}
