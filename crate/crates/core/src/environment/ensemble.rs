use num_complex::Complex64;

use super::EnvError;
use crate::qubits::{apply_rotation_pairs, QubitHamiltonian, StateVector};

/// K orthonormal states sharing one unitary sequence, with normalized,
/// non-increasing positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    members: Vec<StateVector>,
    weights: Vec<f64>,
}

impl EnsembleState {
    /// Builds an ensemble from unnormalized weights.
    pub fn new(members: Vec<StateVector>, raw_weights: &[f64]) -> Result<Self, EnvError> {
        let weights = normalize_weights(raw_weights)?;
        if members.len() != weights.len() {
            return Err(EnvError::InvalidWeights(format!("{} weights for {} states", weights.len(), members.len())));
        }
        let n = members[0].n_qubits();
        if members.iter().any(|m| m.n_qubits() != n) {
            return Err(EnvError::InvalidEnsemble("members differ in qubit count".into()));
        }
        let ensemble = Self { members, weights };
        let err = ensemble.orthonormality_error();
        if err > 1e-10 {
            return Err(EnvError::InvalidEnsemble(format!("members not orthonormal (deviation {err:.3e})")));
        }
        Ok(ensemble)
    }

    /// Single state with weight 1.
    pub fn single(state: StateVector) -> Self {
        Self { members: vec![state], weights: vec![1.0] }
    }

    pub fn members(&self) -> &[StateVector] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].n_qubits()
    }

    /// Applies the same rotation to every member.
    pub fn rotated(&self, pairs: &[(usize, usize)], theta: f64, phase: f64) -> Self {
        Self {
            members: self.members.iter().map(|m| apply_rotation_pairs(m, pairs, theta, phase)).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn with_members(&self, members: Vec<StateVector>) -> Self {
        assert_eq!(members.len(), self.members.len());
        Self { members, weights: self.weights.clone() }
    }

    /// Largest |⟨ψ_μ|ψ_ν⟩ − δ_μν|.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.members.iter().enumerate() {
            for (j, b) in self.members.iter().enumerate().skip(i) {
                let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    /// Per-member energies ⟨ψ_ν|H|ψ_ν⟩.
    pub fn member_energies(&self, h: &QubitHamiltonian) -> Vec<f64> {
        self.members.iter().map(|m| h.expectation(m)).collect()
    }
}

/// Σ_ν w_ν ⟨ψ_ν|H|ψ_ν⟩.
pub fn ensemble_energy(ensemble: &EnsembleState, h: &QubitHamiltonian) -> f64 {
    ensemble.member_energies(h).iter().zip(ensemble.weights()).map(|(e, w)| e * w).sum()
}

/// Normalizes positive weights to unit sum; they must be non-increasing.
pub fn normalize_weights(raw: &[f64]) -> Result<Vec<f64>, EnvError> {
    if raw.is_empty() {
        return Err(EnvError::InvalidWeights("empty weight vector".into()));
    }
    if let Some(w) = raw.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(EnvError::InvalidWeights(format!("weight {w} is not a positive number")));
    }
    if raw.windows(2).any(|p| p[1] > p[0]) {
        return Err(EnvError::InvalidWeights(format!("weights {raw:?} are not non-increasing")));
    }
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|w| w / total).collect())
}
