use std::fmt;

use num_complex::Complex64;

use super::{QubitError, QubitHamiltonian, StateVector};
use crate::environment::EnsembleState;

/// Sign-free two-body operator γ^{pq}_{kl} = σ⁺_p σ⁺_q σ⁻_k σ⁻_l.
///
/// σ⁺ occupies a qubit (|0⟩ → |1⟩) and σ⁻ empties it, with unit matrix
/// elements and no Jordan-Wigner parity string. The operator therefore moves
/// the occupations of `k, l` onto `p, q`; `{p,q}` and `{k,l}` may share one
/// index, in which case that qubit must be occupied and stays occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitOperatorAction {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub l: usize,
}

impl QubitOperatorAction {
    pub fn new(p: usize, q: usize, k: usize, l: usize) -> Result<Self, QubitError> {
        let invalid = |reason| QubitError::InvalidAction { p, q, k, l, reason };
        if p >= q {
            return Err(invalid("requires p < q"));
        }
        if k >= l {
            return Err(invalid("requires k < l"));
        }
        if (p, q) == (k, l) {
            return Err(invalid("raising and lowering pairs coincide"));
        }
        Ok(Self { p, q, k, l })
    }

    pub fn check_qubits(&self, n_qubits: usize) -> Result<(), QubitError> {
        if self.q >= n_qubits || self.l >= n_qubits {
            return Err(QubitError::InvalidAction {
                p: self.p,
                q: self.q,
                k: self.k,
                l: self.l,
                reason: "index outside register",
            });
        }
        Ok(())
    }

    /// The Hermitian-conjugate partner γ^{kl}_{pq}.
    pub fn conjugate(&self) -> Self {
        Self { p: self.k, q: self.l, k: self.p, l: self.q }
    }

    /// Basis label of γ|b⟩, or `None` when γ annihilates |b⟩.
    #[inline]
    pub fn image(&self, b: usize) -> Option<usize> {
        let low = (1usize << self.k) | (1usize << self.l);
        if b & low != low {
            return None;
        }
        let cleared = b & !low;
        let high = (1usize << self.p) | (1usize << self.q);
        if cleared & high != 0 {
            return None;
        }
        Some(cleared | high)
    }

    /// All `(b, γ b)` pairs on an `n_qubits` register, ascending in `b`.
    pub fn pairs(&self, n_qubits: usize) -> Vec<(usize, usize)> {
        (0..1usize << n_qubits).filter_map(|b| self.image(b).map(|t| (b, t))).collect()
    }
}

impl fmt::Display for QubitOperatorAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "γ^{{{}{}}}_{{{}{}}}", self.p, self.q, self.k, self.l)
    }
}

/// e^{θA}|ψ⟩ with A = e^{iφ}γ − e^{−iφ}γ†, given the `(b, γb)` pairs of γ.
///
/// Because γ² = 0, A³ = −A and the exponential is
/// `1 + sin θ A − (1 − cos θ) P` with P = γγ† + γ†γ; on each pair this is a
/// plane rotation and every other amplitude is untouched.
pub fn apply_rotation_pairs(state: &StateVector, pairs: &[(usize, usize)], theta: f64, phase: f64) -> StateVector {
    let mut out = state.clone();
    if theta == 0.0 {
        return out;
    }
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phase);
    let amps = out.amplitudes_mut();
    for &(b, t) in pairs {
        let (x, y) = (amps[b], amps[t]);
        amps[b] = x * c - e.conj() * y * s;
        amps[t] = y * c + e * x * s;
    }
    out
}

/// e^{θA}|ψ⟩ with A = e^{iφ}γ − e^{−iφ}γ†.
pub fn apply_rotation(state: &StateVector, action: &QubitOperatorAction, theta: f64, phase: f64) -> StateVector {
    apply_rotation_pairs(state, &action.pairs(state.n_qubits()), theta, phase)
}

/// e^{θ(γ − γ†)}|ψ⟩.
pub fn apply_sign_free_exponential(state: &StateVector, action: &QubitOperatorAction, theta: f64) -> StateVector {
    apply_rotation(state, action, theta, 0.0)
}

/// ⟨ψ|[γ, H]|ψ⟩ = ⟨ψ|γ(Hψ)⟩ − ⟨Hψ|γψ⟩, given Hψ and the pairs of γ.
pub fn commutator_expectation(psi: &StateVector, h_psi: &StateVector, pairs: &[(usize, usize)]) -> Complex64 {
    let x = psi.amplitudes();
    let hx = h_psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(b, t) in pairs {
        acc += x[t].conj() * hx[b] - hx[t].conj() * x[b];
    }
    acc
}

/// Weighted ensemble residual Σ_ν w_ν ⟨ψ_ν|[γ, H]|ψ_ν⟩.
pub fn residual_entry(ensemble: &EnsembleState, h: &QubitHamiltonian, action: &QubitOperatorAction) -> Complex64 {
    let pairs = action.pairs(h.n_qubits());
    ensemble
        .members()
        .iter()
        .zip(ensemble.weights())
        .map(|(psi, &w)| commutator_expectation(psi, &h.apply(psi), &pairs) * w)
        .sum()
}
