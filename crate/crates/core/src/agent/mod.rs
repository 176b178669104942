//! Deep Q-network agent and lookahead baselines.
//!
//! The network is a plain multilayer perceptron with exact GELU activations,
//! trained by AdamW on the mean-squared Bellman error with a hard-synced
//! target network and uniform experience replay.

mod checkpoint;
mod dqn;
mod greedy;
mod network;
mod optim;
mod replay;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use dqn::{
    argmax, backward_and_update, bellman_target, select_action, sync_target, train_episode, DqnAgent, Episodic,
    TrainConfig,
};
pub use greedy::{beam_search, greedy_lookahead_select, BeamPlan, Snapshot};
pub use network::{gelu, gelu_derivative, Gradients, Linear, QNetwork};
pub use optim::AdamW;
pub use replay::{ReplayBuffer, Transition};

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("empty training batch")]
    EmptyBatch,
    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Env(#[from] crate::environment::EnvError),
}
