//! Reinforcement-learning contracted quantum eigensolver.
//!
//! The crate goes from a molecular geometry to excited-state energies and
//! constant-depth real-time dynamics:
//!
//! - [`chem`]: STO-6G integrals over s-type Gaussians and restricted Hartree-Fock.
//! - [`qubits`]: Jordan-Wigner Hamiltonians, a dense statevector simulator,
//!   sign-free two-qubit operators and exact diagonalization.
//! - [`environment`]: the decision process wrapping ensemble CQE updates.
//! - [`agent`]: a from-scratch deep Q-network and a greedy lookahead baseline.
//! - [`solvers`]: excited-state and time-evolution drivers, geometry scans.

pub mod agent;
pub mod chem;
pub mod environment;
pub mod qubits;
pub mod solvers;

pub use num_complex::Complex64;

/// Conversion factor, Ångström per bohr (CODATA 2018).
pub const BOHR_IN_ANGSTROM: f64 = 0.529177210903;

/// Converts a length in Ångström to bohr.
pub fn angstrom_to_bohr(x: f64) -> f64 {
    x / BOHR_IN_ANGSTROM
}
