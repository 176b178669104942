//! Dense statevector simulation over Jordan-Wigner encoded spin orbitals.
//!
//! Qubit `j` is bit `j` of a computational basis label; a set bit means the
//! spin orbital is occupied.

mod action;
mod hamiltonian;
mod spectrum;
mod state;

pub use action::{
    apply_rotation, apply_rotation_pairs, apply_sign_free_exponential, commutator_expectation, residual_entry,
    QubitOperatorAction,
};
pub use hamiltonian::{hf_reference_states, jw_hamiltonian, QubitHamiltonian, Sector, MAX_QUBITS};
pub use spectrum::{exact_eigensystem, exact_propagate, Eigensystem, Spectrum};
pub use state::StateVector;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the simulator ceiling of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("sector {sector} holds {size} basis states, {requested} requested")]
    SectorTooSmall { sector: Sector, size: usize, requested: usize },
    #[error("invalid action ({p},{q},{k},{l}): {reason}")]
    InvalidAction { p: usize, q: usize, k: usize, l: usize, reason: &'static str },
    #[error("state has zero norm")]
    ZeroNorm,
}

/// Number of set bits below position `p`, i.e. the Jordan-Wigner parity string.
#[inline]
pub(crate) fn parity_below(b: usize, p: usize) -> u32 {
    (b & ((1usize << p) - 1)).count_ones()
}

/// Twice the S_z eigenvalue of a basis label under interleaved ordering.
#[inline]
pub fn two_sz(b: usize) -> i32 {
    let alpha = (b & 0x5555_5555_5555_5555).count_ones() as i32;
    let beta = (b & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
    alpha - beta
}
