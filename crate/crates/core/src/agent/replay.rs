use rand::Rng;

use super::AgentError;
use crate::environment::RLState;

/// `(s, a, R, s', terminal)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: RLState,
    pub action_index: usize,
    pub reward: f64,
    pub next_state: RLState,
    pub terminal: bool,
}

/// Fixed-capacity FIFO of transitions.
///
/// States live in two flat arrays so the buffer holds a handful of large
/// allocations however many transitions it stores.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    width: usize,
    states: Vec<f64>,
    next_states: Vec<f64>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    terminals: Vec<bool>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            width: 0,
            states: Vec::new(),
            next_states: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            terminals: Vec::new(),
            next: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Appends, evicting the oldest entry when full. The first transition
    /// fixes the state width.
    pub fn push(&mut self, t: Transition) -> Result<(), AgentError> {
        if self.is_empty() {
            self.width = t.state.len();
        }
        for got in [t.state.len(), t.next_state.len()] {
            if got != self.width {
                return Err(AgentError::WidthMismatch { expected: self.width, got });
            }
        }
        let w = self.width;
        if self.len() < self.capacity {
            self.states.extend_from_slice(t.state.features());
            self.next_states.extend_from_slice(t.next_state.features());
            self.actions.push(t.action_index);
            self.rewards.push(t.reward);
            self.terminals.push(t.terminal);
        } else {
            let i = self.next;
            self.states[i * w..(i + 1) * w].copy_from_slice(t.state.features());
            self.next_states[i * w..(i + 1) * w].copy_from_slice(t.next_state.features());
            self.actions[i] = t.action_index;
            self.rewards[i] = t.reward;
            self.terminals[i] = t.terminal;
        }
        self.next = (self.next + 1) % self.capacity;
        Ok(())
    }

    pub fn get(&self, i: usize) -> Transition {
        let w = self.width;
        Transition {
            state: RLState::new(self.states[i * w..(i + 1) * w].to_vec()),
            action_index: self.actions[i],
            reward: self.rewards[i],
            next_state: RLState::new(self.next_states[i * w..(i + 1) * w].to_vec()),
            terminal: self.terminals[i],
        }
    }

    /// Uniform sample of `min(batch, len)` distinct entries.
    pub fn sample(&self, batch: usize, rng: &mut impl Rng) -> Vec<Transition> {
        let n = batch.min(self.len());
        rand::seq::index::sample(rng, self.len(), n).into_iter().map(|i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Transition> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }
}
