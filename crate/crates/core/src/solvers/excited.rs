use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::system::{MolecularSystem, ReferenceOrdering};
use super::SolverError;
use crate::agent::{beam_search, train_episode, DqnAgent, TrainConfig};
use crate::environment::{build_action_pool, ActionPool, EnergyEnvironment, EnsembleState, EnvConfig};
use crate::qubits::{QubitHamiltonian, QubitOperatorAction, StateVector};
use crate::Complex64;

/// Action-selection rule used for an excited-state rollout.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    /// Deterministic lookahead over energy-mode transitions; width 1 is
    /// one-step greedy selection.
    Lookahead { width: usize },
    /// ε = 0 rollout of a trained agent.
    Dqn(&'a DqnAgent),
}

/// Settings shared by training, evaluation and scans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSettings {
    /// Maximum number of operators per episode.
    pub step_budget: usize,
    /// Residual weight of the training reward.
    pub lambda: f64,
    /// Residual weight used when the lookahead ranks candidates.
    pub lookahead_lambda: f64,
    pub residual_tolerance: f64,
    /// Restrict the pool to `S_z`-conserving actions.
    pub sz_filter: bool,
    pub ordering: ReferenceOrdering,
    /// Diagonalize `H` in the span of the final members before reporting.
    pub subspace: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            step_budget: 5,
            lambda: 0.5,
            lookahead_lambda: 0.0,
            residual_tolerance: 1e-8,
            sz_filter: true,
            ordering: ReferenceOrdering::ExcitationRank,
            subspace: false,
        }
    }
}

impl SolverSettings {
    pub fn env_config(&self, lambda: f64) -> EnvConfig {
        EnvConfig {
            lambda,
            residual_tolerance: self.residual_tolerance,
            max_steps: self.step_budget,
            ..EnvConfig::default()
        }
    }

    pub fn pool(&self, system: &MolecularSystem) -> Result<ActionPool, SolverError> {
        Ok(build_action_pool(system.n_qubits(), self.sz_filter)?)
    }
}

/// Outcome of one excited-state solve.
#[derive(Debug, Clone)]
pub struct ExcitedStateResult {
    pub bond_angstrom: f64,
    /// Reported energies, ascending.
    pub energies: Vec<f64>,
    /// `⟨ψ_ν|H|ψ_ν⟩` of the final members in reference order.
    pub raw_energies: Vec<f64>,
    pub operator_sequence: Vec<(QubitOperatorAction, f64)>,
    /// ‖r‖ before the first operator and after each one.
    pub residual_trace: Vec<f64>,
    /// Lowest exact sector energies, ascending.
    pub energies_exact: Vec<f64>,
    pub max_abs_error: f64,
    pub subspace_diagonalized: bool,
    pub ensemble: EnsembleState,
}

impl ExcitedStateResult {
    pub fn n_operators(&self) -> usize {
        self.operator_sequence.len()
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_trace.last().expect("trace holds the initial residual")
    }
}

/// Diagonalizes `H` in the span of orthonormal `members`.
///
/// Returns the rotated members and their energies, ascending.
pub fn subspace_diagonalize(members: &[StateVector], h: &QubitHamiltonian) -> (Vec<StateVector>, Vec<f64>) {
    let k = members.len();
    if k == 0 {
        return (Vec::new(), Vec::new());
    }
    let h_members: Vec<StateVector> = members.iter().map(|m| h.apply(m)).collect();
    let mut sub = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = members[i].inner(&h_members[j]);
            sub[(i, j)] = v;
            sub[(j, i)] = v.conj();
        }
        sub[(i, i)].im = 0.0;
    }
    let eig = SymmetricEigen::new(sub);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = members[0].n_qubits();
    let mut rotated = Vec::with_capacity(k);
    for &col in &order {
        let mut amps = vec![Complex64::new(0.0, 0.0); members[0].dim()];
        for (mu, m) in members.iter().enumerate() {
            let c = eig.eigenvectors[(mu, col)];
            for (a, x) in amps.iter_mut().zip(m.amplitudes()) {
                *a += c * x;
            }
        }
        rotated.push(StateVector::normalized(n, amps).expect("rotation of an orthonormal set"));
    }
    let values = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    (rotated, values)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_abs_error(energies: &[f64], exact: &[f64]) -> f64 {
    energies.iter().zip(exact).map(|(e, x)| (e - x).abs()).fold(0.0, f64::max)
}

/// Rolls out `policy` from `initial` and reports the energies.
pub fn evaluate_from(
    policy: Policy<'_>,
    system: &MolecularSystem,
    initial: EnsembleState,
    settings: &SolverSettings,
) -> Result<ExcitedStateResult, SolverError> {
    let h = &system.hamiltonian;
    let pool = settings.pool(system)?;
    let (ensemble, outcomes, r0) = match policy {
        Policy::Lookahead { width } => {
            let plan = beam_search(&initial, h, &pool, &settings.env_config(settings.lookahead_lambda), width)?;
            (plan.ensemble, plan.outcomes, plan.initial_residual_norm)
        }
        Policy::Dqn(agent) => {
            if agent.online.output_width() != pool.len() {
                return Err(SolverError::Invalid(format!(
                    "agent has {} outputs but the pool holds {} actions",
                    agent.online.output_width(),
                    pool.len()
                )));
            }
            let mut env = EnergyEnvironment::new(h, &pool, initial, settings.env_config(settings.lambda))?;
            let r0 = env.residual_norm();
            let mut outcomes = Vec::new();
            while !env.is_done() {
                let a = agent.greedy(env.rl_state())?;
                outcomes.push(env.step(a)?);
            }
            (env.ensemble().clone(), outcomes, r0)
        }
    };
    let mut residual_trace = vec![r0];
    residual_trace.extend(outcomes.iter().map(|o| o.residual_norm));
    let operator_sequence = outcomes
        .iter()
        .map(|o| Ok((*pool.action(o.action_index)?, o.theta)))
        .collect::<Result<Vec<_>, SolverError>>()?;
    let k = ensemble.len();
    let raw_energies = ensemble.member_energies(h);
    let energies_exact = system.exact_energies(k);
    let energies =
        if settings.subspace { subspace_diagonalize(ensemble.members(), h).1 } else { sorted(raw_energies.clone()) };
    Ok(ExcitedStateResult {
        bond_angstrom: system.bond_angstrom,
        max_abs_error: max_abs_error(&energies, &energies_exact),
        energies,
        raw_energies,
        operator_sequence,
        residual_trace,
        energies_exact,
        subspace_diagonalized: settings.subspace,
        ensemble,
    })
}

/// Rolls out `policy` from the reference ensemble of `weights`.
pub fn evaluate_excited(
    policy: Policy<'_>,
    system: &MolecularSystem,
    weights: &[f64],
    settings: &SolverSettings,
) -> Result<ExcitedStateResult, SolverError> {
    let initial = system.reference_ensemble(weights, settings.ordering)?;
    evaluate_from(policy, system, initial, settings)
}

/// Training schedule extras on top of the DQN hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingOptions {
    /// Episodes between ε = 0 evaluation rollouts; `None` disables them.
    pub eval_period: Option<usize>,
    /// Stop once an evaluation rollout drives ‖r‖ below the residual tolerance.
    pub early_stop: bool,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        Self { eval_period: Some(25), early_stop: true }
    }
}

/// Per-episode training record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearningCurve {
    /// Reward of the last transition of each episode.
    pub final_rewards: Vec<f64>,
    /// `(episode, final residual)` of each evaluation rollout.
    pub evaluations: Vec<(usize, f64)>,
    /// Episode after which training stopped early.
    pub stopped_at: Option<usize>,
}

/// Trains a DQN agent on the reference ensemble of `weights`.
pub fn train_excited(
    system: &MolecularSystem,
    weights: &[f64],
    settings: &SolverSettings,
    config: &TrainConfig,
    options: &TrainingOptions,
) -> Result<(DqnAgent, LearningCurve), SolverError> {
    let h = &system.hamiltonian;
    let pool = settings.pool(system)?;
    let initial = system.reference_ensemble(weights, settings.ordering)?;
    let env_config = settings.env_config(config.lambda);
    let mut env = EnergyEnvironment::new(h, &pool, initial.clone(), env_config)?;
    let mut agent = DqnAgent::new(2 * pool.len(), pool.len(), config.clone())?;
    let mut curve = LearningCurve::default();
    for episode in 0..config.episodes {
        let reward = train_episode(&mut agent, &mut env, config.epsilon(episode))?;
        curve.final_rewards.push(reward);
        let due = options.eval_period.is_some_and(|p| p > 0 && (episode + 1) % p == 0);
        if due {
            let eval = evaluate_from(Policy::Dqn(&agent), system, initial.clone(), settings)?;
            curve.evaluations.push((episode + 1, eval.final_residual()));
            if options.early_stop && eval.final_residual() < settings.residual_tolerance {
                curve.stopped_at = Some(episode + 1);
                break;
            }
        }
    }
    Ok((agent, curve))
}
