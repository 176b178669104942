use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::QNetwork;
use super::optim::AdamW;
use super::replay::{ReplayBuffer, Transition};
use super::AgentError;
use crate::environment::{EnergyEnvironment, EnvError, FidelityEnvironment, RLState, StepOutcome};

/// DQN hyperparameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrainConfig {
    /// Discount factor η.
    pub discount: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub episodes: usize,
    /// Residual weight λ of the energy-mode reward.
    pub lambda: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the episodes over which ε decays linearly.
    pub epsilon_decay_fraction: f64,
    /// Train steps between hard target-network copies.
    pub target_sync_period: usize,
    pub seed: u64,
    pub hidden_width: usize,
    pub n_layers: usize,
    pub replay_capacity: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub weight_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            discount: 0.99,
            learning_rate: 2e-4,
            batch_size: 256,
            episodes: 3000,
            lambda: 0.5,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.5,
            target_sync_period: 100,
            seed: 0,
            hidden_width: 512,
            n_layers: 8,
            replay_capacity: 1_000_000,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            weight_decay: 0.01,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |msg: &str| Err(AgentError::InvalidConfig(msg.to_string()));
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return bad("discount must lie in (0, 1)");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 || self.replay_capacity == 0 || self.target_sync_period == 0 {
            return bad("batch size, replay capacity and sync period must be positive");
        }
        if !(0.0..=1.0).contains(&self.epsilon_start) || !(0.0..=1.0).contains(&self.epsilon_end) {
            return bad("epsilon must lie in [0, 1]");
        }
        if !(self.lambda >= 0.0) {
            return bad("lambda must be non-negative");
        }
        if self.n_layers == 0 || self.hidden_width == 0 {
            return bad("network needs at least one layer and a positive width");
        }
        Ok(())
    }

    /// Linear decay from `epsilon_start` to `epsilon_end`, then constant.
    pub fn epsilon(&self, episode: usize) -> f64 {
        let horizon = (self.episodes as f64 * self.epsilon_decay_fraction).max(1.0);
        let frac = (episode as f64 / horizon).min(1.0);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

/// Index of the largest value; ties go to the lowest index and NaN never wins.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] || values[best].is_nan() && !v.is_nan() {
            best = i;
        }
    }
    best
}

/// ε-greedy choice. One uniform draw is always consumed.
pub fn select_action(net: &QNetwork, state: &RLState, epsilon: f64, rng: &mut impl Rng) -> Result<usize, AgentError> {
    let explore = rng.random::<f64>() < epsilon;
    if explore {
        Ok(rng.random_range(0..net.output_width()))
    } else {
        Ok(argmax(&net.forward(state.features())?))
    }
}

/// `y = R` for terminal transitions, else `R + η max_a Q(s', a)`.
pub fn bellman_target(reward: f64, discount: f64, next_max: f64, terminal: bool) -> f64 {
    if terminal {
        reward
    } else {
        reward + discount * next_max
    }
}

/// One AdamW step on the mean-squared Bellman error of `batch`; returns the loss.
pub fn backward_and_update(
    net: &mut QNetwork,
    batch: &[&Transition],
    target: &QNetwork,
    discount: f64,
    optimizer: &mut AdamW,
) -> Result<f64, AgentError> {
    if batch.is_empty() {
        return Err(AgentError::EmptyBatch);
    }
    let rows = batch.len();
    let n_out = net.output_width();
    // Terminal rows feed zeros so the batch shape never changes; their
    // next-state values are discarded.
    let width = target.input_width();
    let mut x_next = vec![0.0; rows * width];
    for (chunk, t) in x_next.chunks_exact_mut(width).zip(batch) {
        if !t.terminal {
            if t.next_state.len() != width {
                return Err(AgentError::WidthMismatch { expected: width, got: t.next_state.len() });
            }
            chunk.copy_from_slice(t.next_state.features());
        }
    }
    let q_next = target.forward_batch(&x_next, rows)?;
    let next_max: Vec<f64> =
        q_next.chunks_exact(n_out).map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    let y: Vec<f64> =
        batch.iter().zip(&next_max).map(|(t, &m)| bellman_target(t.reward, discount, m, t.terminal)).collect();
    for t in batch {
        if t.action_index >= n_out {
            return Err(AgentError::WidthMismatch { expected: n_out, got: t.action_index + 1 });
        }
    }
    let x: Vec<f64> = batch.iter().flat_map(|t| t.state.features().iter().copied()).collect();
    let mut loss = 0.0;
    let (_, grads) = net.backward(&x, rows, |q| {
        let mut d = vec![0.0; q.len()];
        for (r, t) in batch.iter().enumerate() {
            let diff = q[r * n_out + t.action_index] - y[r];
            loss += diff * diff / rows as f64;
            d[r * n_out + t.action_index] = 2.0 * diff / rows as f64;
        }
        d
    })?;
    optimizer.update(net, &grads);
    Ok(loss)
}

/// Hard copy of the online parameters into the target network.
pub fn sync_target(net: &QNetwork, target: &mut QNetwork) {
    target.copy_from(net);
}

/// Online and target networks, optimizer, replay and the training RNG.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub online: QNetwork,
    pub target: QNetwork,
    pub optimizer: AdamW,
    pub replay: ReplayBuffer,
    pub config: TrainConfig,
    pub train_steps: u64,
    rng: ChaCha8Rng,
}

impl DqnAgent {
    pub fn new(input: usize, n_actions: usize, config: TrainConfig) -> Result<Self, AgentError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let online = QNetwork::with_shape(input, config.hidden_width, config.n_layers, n_actions, &mut rng)?;
        Ok(Self::from_parts(online.clone(), online, config, rng))
    }

    fn from_parts(online: QNetwork, target: QNetwork, config: TrainConfig, rng: ChaCha8Rng) -> Self {
        let optimizer = AdamW::new(
            &online,
            config.learning_rate,
            config.beta1,
            config.beta2,
            config.adam_epsilon,
            config.weight_decay,
        );
        let replay = ReplayBuffer::new(config.replay_capacity.min(1 << 24));
        Self { online, target, optimizer, replay, config, train_steps: 0, rng }
    }

    /// Rebuilds an agent around restored networks and optimizer state.
    pub fn restore(
        online: QNetwork,
        target: QNetwork,
        optimizer: AdamW,
        train_steps: u64,
        config: TrainConfig,
    ) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed ^ train_steps);
        let mut agent = Self::from_parts(online, target, config, rng);
        agent.optimizer = optimizer;
        agent.train_steps = train_steps;
        agent
    }

    pub fn act(&mut self, state: &RLState, epsilon: f64) -> Result<usize, AgentError> {
        select_action(&self.online, state, epsilon, &mut self.rng)
    }

    pub fn greedy(&self, state: &RLState) -> Result<usize, AgentError> {
        Ok(argmax(&self.online.forward(state.features())?))
    }

    /// Stores a transition and trains once the buffer holds a full batch.
    pub fn observe(&mut self, t: Transition) -> Result<Option<f64>, AgentError> {
        self.replay.push(t)?;
        if self.replay.len() < self.config.batch_size {
            return Ok(None);
        }
        let batch = self.replay.sample(self.config.batch_size, &mut self.rng);
        let batch: Vec<&Transition> = batch.iter().collect();
        let loss =
            backward_and_update(&mut self.online, &batch, &self.target, self.config.discount, &mut self.optimizer)?;
        self.train_steps += 1;
        if self.train_steps % self.config.target_sync_period as u64 == 0 {
            sync_target(&self.online, &mut self.target);
        }
        Ok(Some(loss))
    }
}

/// Episodic environments the agent can train on.
pub trait Episodic {
    fn reset_state(&mut self) -> RLState;
    fn current_state(&self) -> RLState;
    fn apply(&mut self, action_index: usize) -> Result<StepOutcome, EnvError>;
    fn finished(&self) -> bool;
    /// Whether the current state met the convergence test, as opposed to
    /// running out of budget.
    fn converged(&self) -> bool;
}

impl Episodic for EnergyEnvironment<'_> {
    fn reset_state(&mut self) -> RLState {
        self.reset().clone()
    }
    fn current_state(&self) -> RLState {
        self.rl_state().clone()
    }
    fn apply(&mut self, action_index: usize) -> Result<StepOutcome, EnvError> {
        self.step(action_index)
    }
    fn finished(&self) -> bool {
        self.is_done()
    }
    fn converged(&self) -> bool {
        self.residual_norm() < self.config().residual_tolerance
    }
}

impl Episodic for FidelityEnvironment<'_> {
    fn reset_state(&mut self) -> RLState {
        self.reset().clone()
    }
    fn current_state(&self) -> RLState {
        self.rl_state().clone()
    }
    fn apply(&mut self, action_index: usize) -> Result<StepOutcome, EnvError> {
        self.step(action_index)
    }
    fn finished(&self) -> bool {
        self.is_done()
    }
    fn converged(&self) -> bool {
        self.fidelity() >= 1.0 - self.config().fidelity_tolerance
    }
}

/// Runs one ε-greedy training episode; returns the final reward.
///
/// A converged state is absorbing: every action leaves it in place with the
/// same reward, so the transition into it stores the discounted return
/// `R / (1 − η)`. Transitions that exhaust the budget keep the plain reward.
pub fn train_episode<E: Episodic>(agent: &mut DqnAgent, env: &mut E, epsilon: f64) -> Result<f64, AgentError> {
    let mut state = env.reset_state();
    let mut last_reward = 0.0;
    while !env.finished() {
        let action = agent.act(&state, epsilon)?;
        let outcome = env.apply(action)?;
        last_reward = outcome.reward;
        let next = outcome.next_rl_state.clone();
        let reward = if env.converged() { outcome.reward / (1.0 - agent.config.discount) } else { outcome.reward };
        agent.observe(Transition {
            state,
            action_index: action,
            reward,
            next_state: next.clone(),
            terminal: outcome.terminal,
        })?;
        state = next;
    }
    Ok(last_reward)
}
