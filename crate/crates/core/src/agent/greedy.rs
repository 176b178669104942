//! Lookahead baselines: one-step greedy selection and a beam planner over
//! energy-mode transitions.

use super::dqn::argmax;
use crate::environment::{
    compute_rl_state, energy_mode_outcomes, energy_mode_rewards, fidelity_mode_rewards, ActionPool, EnsembleState,
    EnvConfig, EnvError, StepOutcome,
};
use crate::qubits::{QubitHamiltonian, StateVector};

/// What the lookahead scores against.
#[derive(Debug, Clone, Copy)]
pub enum Snapshot<'a> {
    Energy(&'a EnsembleState),
    Fidelity { current: &'a StateVector, target: &'a StateVector },
}

/// Pool index with the best one-step reward; ties go to the lowest index.
pub fn greedy_lookahead_select(
    snapshot: Snapshot<'_>,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    config: &EnvConfig,
) -> Result<usize, EnvError> {
    let rewards = match snapshot {
        Snapshot::Energy(ensemble) => energy_mode_rewards(ensemble, h, pool, config)?,
        Snapshot::Fidelity { current, target } => fidelity_mode_rewards(current, target, pool)?,
    };
    Ok(argmax(&rewards))
}

/// Result of a beam search: the best operator sequence found and where it leads.
#[derive(Debug, Clone)]
pub struct BeamPlan {
    pub outcomes: Vec<StepOutcome>,
    pub ensemble: EnsembleState,
    /// Residual norm of the initial ensemble.
    pub initial_residual_norm: f64,
}

impl BeamPlan {
    pub fn actions(&self) -> Vec<usize> {
        self.outcomes.iter().map(|o| o.action_index).collect()
    }
}

struct Node {
    ensemble: EnsembleState,
    outcomes: Vec<StepOutcome>,
    score: f64,
}

struct Candidate {
    parent: usize,
    outcome: StepOutcome,
}

/// Breadth-limited search over energy-mode transitions.
///
/// Each layer expands every kept node by every pool action and keeps the
/// `width` children with the best reward. From the second layer on, a child
/// whose residual norm exceeds its parent's is discarded. Children whose
/// ensemble energies agree to 1e-12 are treated as duplicates. The search
/// stops when the best node is terminal, when no child survives, or after
/// `config.max_steps` layers, and returns the best node seen. Width 1 is
/// greedy lookahead.
pub fn beam_search(
    initial: &EnsembleState,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    config: &EnvConfig,
    width: usize,
) -> Result<BeamPlan, EnvError> {
    let width = width.max(1);
    let (_, r0) = compute_rl_state(initial, h, pool)?;
    let initial_score = f64::NEG_INFINITY;
    let mut best = Node { ensemble: initial.clone(), outcomes: Vec::new(), score: initial_score };
    if r0 < config.residual_tolerance {
        return Ok(BeamPlan { outcomes: Vec::new(), ensemble: best.ensemble, initial_residual_norm: r0 });
    }
    let mut beam = vec![Node { ensemble: initial.clone(), outcomes: Vec::new(), score: initial_score }];
    for _ in 0..config.max_steps {
        let mut candidates = Vec::with_capacity(beam.len() * pool.len());
        for (parent, node) in beam.iter().enumerate() {
            let bound = node.outcomes.last().map(|o| o.residual_norm * (1.0 + 1e-9) + 1e-12);
            for outcome in energy_mode_outcomes(&node.ensemble, h, pool, config)? {
                if bound.is_none_or(|b| outcome.residual_norm <= b) {
                    candidates.push(Candidate { parent, outcome });
                }
            }
        }
        // Stable sort keeps generation order among equal rewards.
        candidates.sort_by(|a, b| b.outcome.reward.total_cmp(&a.outcome.reward));
        let mut kept: Vec<Candidate> = Vec::with_capacity(width);
        for c in candidates {
            if kept.len() == width {
                break;
            }
            let e = c.outcome.ensemble_energy;
            let dup = kept.iter().any(|k| (k.outcome.ensemble_energy - e).abs() <= 1e-12 * e.abs().max(1.0));
            if !dup {
                kept.push(c);
            }
        }
        if kept.is_empty() {
            break;
        }
        let next: Vec<Node> = kept
            .into_iter()
            .map(|c| {
                let parent = &beam[c.parent];
                let pairs = pool.pairs(c.outcome.action_index);
                let ensemble = parent.ensemble.rotated(pairs, c.outcome.theta, 0.0);
                let mut outcomes = parent.outcomes.clone();
                let score = c.outcome.reward;
                outcomes.push(c.outcome);
                Node { ensemble, outcomes, score }
            })
            .collect();
        beam = next;
        let top = &beam[0];
        if top.score > best.score {
            best = Node { ensemble: top.ensemble.clone(), outcomes: top.outcomes.clone(), score: top.score };
        }
        if top.outcomes.last().is_some_and(|o| o.terminal) {
            break;
        }
    }
    Ok(BeamPlan { outcomes: best.outcomes, ensemble: best.ensemble, initial_residual_norm: r0 })
}
