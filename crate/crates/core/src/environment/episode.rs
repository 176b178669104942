use std::fmt::Write as _;

use super::step::{compute_rl_state, step_energy_mode, step_fidelity_mode};
use super::{ensemble_energy, ActionPool, EnsembleState, EnvConfig, EnvError, RLState, StepOutcome};
use crate::qubits::{QubitHamiltonian, QubitOperatorAction, StateVector};

/// One row of an exported episode trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub action: QubitOperatorAction,
    pub theta: f64,
    pub phase: f64,
    pub ensemble_energy: f64,
    pub residual_norm: f64,
    pub reward: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeTrace {
    pub rows: Vec<TraceRow>,
}

impl EpisodeTrace {
    pub const CSV_HEADER: &'static str = "step,p,q,k,l,theta,ensemble_energy,residual_norm,reward,fidelity";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fid = r.fidelity.map(|f| f.to_string()).unwrap_or_default();
            let a = r.action;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.step, a.p, a.q, a.k, a.l, r.theta, r.ensemble_energy, r.residual_norm, r.reward, fid
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// Applied `(action, θ, φ)` in order.
    pub fn sequence(&self) -> Vec<(QubitOperatorAction, f64, f64)> {
        self.rows.iter().map(|r| (r.action, r.theta, r.phase)).collect()
    }

    fn push(&mut self, action: QubitOperatorAction, outcome: &StepOutcome) {
        self.rows.push(TraceRow {
            step: self.rows.len() + 1,
            action,
            theta: outcome.theta,
            phase: outcome.phase,
            ensemble_energy: outcome.ensemble_energy,
            residual_norm: outcome.residual_norm,
            reward: outcome.reward,
            fidelity: outcome.fidelity,
        });
    }
}

/// Energy-mode episode over a fixed Hamiltonian, pool and reference ensemble.
#[derive(Debug, Clone)]
pub struct EnergyEnvironment<'a> {
    h: &'a QubitHamiltonian,
    pool: &'a ActionPool,
    config: EnvConfig,
    initial: EnsembleState,
    ensemble: EnsembleState,
    rl_state: RLState,
    residual_norm: f64,
    energy: f64,
    trace: EpisodeTrace,
    done: bool,
}

impl<'a> EnergyEnvironment<'a> {
    pub fn new(
        h: &'a QubitHamiltonian,
        pool: &'a ActionPool,
        initial: EnsembleState,
        config: EnvConfig,
    ) -> Result<Self, EnvError> {
        let (rl_state, residual_norm) = compute_rl_state(&initial, h, pool)?;
        let energy = ensemble_energy(&initial, h);
        Ok(Self {
            h,
            pool,
            config,
            ensemble: initial.clone(),
            initial,
            done: residual_norm < config.residual_tolerance || config.max_steps == 0,
            rl_state,
            residual_norm,
            energy,
            trace: EpisodeTrace::default(),
        })
    }

    /// Restores the reference ensemble.
    pub fn reset(&mut self) -> &RLState {
        let (rl, norm) = compute_rl_state(&self.initial, self.h, self.pool).expect("register checked at construction");
        self.ensemble = self.initial.clone();
        self.rl_state = rl;
        self.residual_norm = norm;
        self.energy = ensemble_energy(&self.initial, self.h);
        self.trace = EpisodeTrace::default();
        self.done = norm < self.config.residual_tolerance || self.config.max_steps == 0;
        &self.rl_state
    }

    /// Applies pool action `action_index`; `terminal` also flags an exhausted budget.
    pub fn step(&mut self, action_index: usize) -> Result<StepOutcome, EnvError> {
        let (next, mut outcome) = step_energy_mode(&self.ensemble, self.h, self.pool, action_index, &self.config)?;
        self.trace.push(*self.pool.action(action_index)?, &outcome);
        outcome.terminal |= self.trace.rows.len() >= self.config.max_steps;
        self.ensemble = next;
        self.rl_state = outcome.next_rl_state.clone();
        self.residual_norm = outcome.residual_norm;
        self.energy = outcome.ensemble_energy;
        self.done = outcome.terminal;
        Ok(outcome)
    }

    pub fn hamiltonian(&self) -> &'a QubitHamiltonian {
        self.h
    }

    pub fn pool(&self) -> &'a ActionPool {
        self.pool
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn ensemble(&self) -> &EnsembleState {
        &self.ensemble
    }

    pub fn rl_state(&self) -> &RLState {
        &self.rl_state
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps(&self) -> usize {
        self.trace.rows.len()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn trace(&self) -> &EpisodeTrace {
        &self.trace
    }
}

/// Fidelity-mode episode preparing `target` from a fixed reference state.
#[derive(Debug, Clone)]
pub struct FidelityEnvironment<'a> {
    h: &'a QubitHamiltonian,
    pool: &'a ActionPool,
    config: EnvConfig,
    reference: StateVector,
    target: StateVector,
    current: StateVector,
    rl_state: RLState,
    fidelity: f64,
    trace: EpisodeTrace,
    done: bool,
}

impl<'a> FidelityEnvironment<'a> {
    pub fn new(
        h: &'a QubitHamiltonian,
        pool: &'a ActionPool,
        reference: StateVector,
        target: StateVector,
        config: EnvConfig,
    ) -> Result<Self, EnvError> {
        let (rl_state, _) = compute_rl_state(&EnsembleState::single(reference.clone()), h, pool)?;
        let fidelity = target.fidelity(&reference).min(1.0);
        Ok(Self {
            h,
            pool,
            config,
            current: reference.clone(),
            reference,
            target,
            rl_state,
            fidelity,
            trace: EpisodeTrace::default(),
            done: fidelity >= 1.0 - config.fidelity_tolerance || config.max_steps == 0,
        })
    }

    pub fn reset(&mut self) -> &RLState {
        let (rl, _) = compute_rl_state(&EnsembleState::single(self.reference.clone()), self.h, self.pool)
            .expect("register checked at construction");
        self.current = self.reference.clone();
        self.rl_state = rl;
        self.fidelity = self.target.fidelity(&self.reference).min(1.0);
        self.trace = EpisodeTrace::default();
        self.done = self.fidelity >= 1.0 - self.config.fidelity_tolerance || self.config.max_steps == 0;
        &self.rl_state
    }

    pub fn step(&mut self, action_index: usize) -> Result<StepOutcome, EnvError> {
        let (next, mut outcome) =
            step_fidelity_mode(&self.current, &self.target, self.h, self.pool, action_index, &self.config)?;
        self.trace.push(*self.pool.action(action_index)?, &outcome);
        outcome.terminal |= self.trace.rows.len() >= self.config.max_steps;
        self.current = next;
        self.rl_state = outcome.next_rl_state.clone();
        self.fidelity = outcome.fidelity.unwrap_or(0.0);
        self.done = outcome.terminal;
        Ok(outcome)
    }

    pub fn hamiltonian(&self) -> &'a QubitHamiltonian {
        self.h
    }

    pub fn pool(&self) -> &'a ActionPool {
        self.pool
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn current(&self) -> &StateVector {
        &self.current
    }

    pub fn target(&self) -> &StateVector {
        &self.target
    }

    pub fn rl_state(&self) -> &RLState {
        &self.rl_state
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    pub fn steps(&self) -> usize {
        self.trace.rows.len()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn trace(&self) -> &EpisodeTrace {
        &self.trace
    }
}
