use num_complex::Complex64;

use super::landscape::{EnergyLandscape, FidelityLandscape};
use super::{ensemble_energy, ActionPool, EnsembleState, EnvError};
use crate::qubits::{apply_rotation_pairs, commutator_expectation, QubitHamiltonian, QubitOperatorAction, StateVector};

/// Environment settings shared by both reward modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvConfig {
    /// Weight of the residual norm in the energy-mode reward.
    pub lambda: f64,
    /// Energy-mode episodes end once ‖r‖ drops below this.
    pub residual_tolerance: f64,
    /// Fidelity-mode episodes end once `1 − F` drops below this.
    pub fidelity_tolerance: f64,
    /// Step budget per episode.
    pub max_steps: usize,
    /// Angle tolerance of the line search.
    pub theta_tolerance: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self { lambda: 0.5, residual_tolerance: 1e-8, fidelity_tolerance: 1e-6, max_steps: 5, theta_tolerance: 1e-10 }
    }
}

/// Real parts then imaginary parts of the residual of every pool action.
#[derive(Debug, Clone, PartialEq)]
pub struct RLState {
    features: Vec<f64>,
}

impl RLState {
    pub fn new(features: Vec<f64>) -> Self {
        Self { features }
    }

    pub fn from_residuals(residuals: &[Complex64]) -> Self {
        let mut features: Vec<f64> = residuals.iter().map(|r| r.re).collect();
        features.extend(residuals.iter().map(|r| r.im));
        Self { features }
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Euclidean norm over the complex residual entries.
    pub fn residual_norm(&self) -> f64 {
        self.features.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub action_index: usize,
    pub next_rl_state: RLState,
    pub reward: f64,
    pub theta: f64,
    /// Generator phase φ of `e^{iφ}γ − e^{−iφ}γ†`; zero in energy mode.
    pub phase: f64,
    pub terminal: bool,
    pub ensemble_energy: f64,
    pub residual_norm: f64,
    pub fidelity: Option<f64>,
}

fn check_register(pool: &ActionPool, n_qubits: usize) -> Result<(), EnvError> {
    if pool.n_qubits() != n_qubits {
        return Err(EnvError::RegisterMismatch { pool: pool.n_qubits(), state: n_qubits });
    }
    Ok(())
}

fn h_members(ensemble: &EnsembleState, h: &QubitHamiltonian) -> Vec<StateVector> {
    ensemble.members().iter().map(|m| h.apply(m)).collect()
}

fn residuals_with(ensemble: &EnsembleState, h_psi: &[StateVector], pool: &ActionPool) -> Vec<Complex64> {
    (0..pool.len())
        .map(|i| {
            let pairs = pool.pairs(i);
            ensemble
                .members()
                .iter()
                .zip(h_psi)
                .zip(ensemble.weights())
                .map(|((psi, hpsi), &w)| commutator_expectation(psi, hpsi, pairs) * w)
                .sum()
        })
        .collect()
}

/// Residual features of `ensemble` and the norm ‖r‖.
pub fn compute_rl_state(
    ensemble: &EnsembleState,
    h: &QubitHamiltonian,
    pool: &ActionPool,
) -> Result<(RLState, f64), EnvError> {
    check_register(pool, ensemble.n_qubits())?;
    let state = RLState::from_residuals(&residuals_with(ensemble, &h_members(ensemble, h), pool));
    let norm = state.residual_norm();
    Ok((state, norm))
}

/// Angle minimizing the weighted ensemble energy along `e^{θ(γ − γ†)}`.
pub fn optimize_theta(
    ensemble: &EnsembleState,
    h: &QubitHamiltonian,
    action: &QubitOperatorAction,
) -> Result<(f64, f64), EnvError> {
    action.check_qubits(ensemble.n_qubits())?;
    let pairs = action.pairs(ensemble.n_qubits());
    let landscape = EnergyLandscape::new(ensemble, &h_members(ensemble, h), h, &pairs);
    Ok(landscape.minimize(EnvConfig::default().theta_tolerance))
}

/// Angle and phase maximizing `|⟨χ|e^{θA(φ)}ψ⟩|²`, with the fidelity reached.
pub fn optimize_fidelity(
    current: &StateVector,
    target: &StateVector,
    action: &QubitOperatorAction,
) -> Result<(f64, f64, f64), EnvError> {
    action.check_qubits(current.n_qubits())?;
    let pairs = action.pairs(current.n_qubits());
    Ok(FidelityLandscape::new(current, target, &pairs).maximize())
}

/// Energy-mode transition: optimize θ, rotate every member, score with
/// `R = −E_w − λ‖r‖`.
pub fn step_energy_mode(
    ensemble: &EnsembleState,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    action_index: usize,
    config: &EnvConfig,
) -> Result<(EnsembleState, StepOutcome), EnvError> {
    check_register(pool, ensemble.n_qubits())?;
    pool.action(action_index)?;
    let h_psi = h_members(ensemble, h);
    Ok(energy_transition(ensemble, &h_psi, h, pool, action_index, config))
}

fn energy_transition(
    ensemble: &EnsembleState,
    h_psi: &[StateVector],
    h: &QubitHamiltonian,
    pool: &ActionPool,
    action_index: usize,
    config: &EnvConfig,
) -> (EnsembleState, StepOutcome) {
    let pairs = pool.pairs(action_index);
    let (theta, _) = EnergyLandscape::new(ensemble, h_psi, h, pairs).minimize(config.theta_tolerance);
    let next = ensemble.rotated(pairs, theta, 0.0);
    let next_h = h_members(&next, h);
    let rl = RLState::from_residuals(&residuals_with(&next, &next_h, pool));
    let residual_norm = rl.residual_norm();
    let energy: f64 =
        next.members().iter().zip(&next_h).zip(next.weights()).map(|((psi, hpsi), w)| w * psi.inner(hpsi).re).sum();
    let outcome = StepOutcome {
        action_index,
        next_rl_state: rl,
        reward: -energy - config.lambda * residual_norm,
        theta,
        phase: 0.0,
        terminal: residual_norm < config.residual_tolerance,
        ensemble_energy: energy,
        residual_norm,
        fidelity: None,
    };
    (next, outcome)
}

/// Fidelity-mode transition toward `target`; reward `|⟨χ|φ⟩|²`.
pub fn step_fidelity_mode(
    current: &StateVector,
    target: &StateVector,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    action_index: usize,
    config: &EnvConfig,
) -> Result<(StateVector, StepOutcome), EnvError> {
    check_register(pool, current.n_qubits())?;
    pool.action(action_index)?;
    let pairs = pool.pairs(action_index);
    let (theta, phase, _) = FidelityLandscape::new(current, target, pairs).maximize();
    let next = apply_rotation_pairs(current, pairs, theta, phase);
    let fidelity = target.fidelity(&next).min(1.0);
    let single = EnsembleState::single(next.clone());
    let (rl, residual_norm) = compute_rl_state(&single, h, pool)?;
    let outcome = StepOutcome {
        action_index,
        next_rl_state: rl,
        reward: fidelity,
        theta,
        phase,
        terminal: fidelity >= 1.0 - config.fidelity_tolerance,
        ensemble_energy: ensemble_energy(&single, h),
        residual_norm,
        fidelity: Some(fidelity),
    };
    Ok((next, outcome))
}

/// One-step energy-mode outcome of every pool action, in pool order.
pub fn energy_mode_outcomes(
    ensemble: &EnsembleState,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    config: &EnvConfig,
) -> Result<Vec<StepOutcome>, EnvError> {
    check_register(pool, ensemble.n_qubits())?;
    let h_psi = h_members(ensemble, h);
    Ok((0..pool.len()).map(|i| energy_transition(ensemble, &h_psi, h, pool, i, config).1).collect())
}

/// One-step energy-mode reward of every pool action.
pub fn energy_mode_rewards(
    ensemble: &EnsembleState,
    h: &QubitHamiltonian,
    pool: &ActionPool,
    config: &EnvConfig,
) -> Result<Vec<f64>, EnvError> {
    Ok(energy_mode_outcomes(ensemble, h, pool, config)?.into_iter().map(|o| o.reward).collect())
}

/// One-step fidelity reached by every pool action.
pub fn fidelity_mode_rewards(
    current: &StateVector,
    target: &StateVector,
    pool: &ActionPool,
) -> Result<Vec<f64>, EnvError> {
    check_register(pool, current.n_qubits())?;
    Ok((0..pool.len()).map(|i| FidelityLandscape::new(current, target, pool.pairs(i)).maximize().2).collect())
}
