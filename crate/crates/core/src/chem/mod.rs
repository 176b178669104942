//! Molecular integrals and closed-shell Hartree-Fock for hydrogen clusters.

mod basis;
mod boys;
mod geometry;
mod integrals;
mod scf;
mod spin;

pub use basis::{parse_basis, sto6g_basis, sto6g_hydrogen, ContractedSOrbital, Primitive};
pub use boys::boys_f0;
pub use geometry::{Atom, Geometry};
pub use integrals::{
    build_integrals, primitive_eri, primitive_kinetic, primitive_nuclear, primitive_overlap, primitive_s_integrals,
    Eri, IntegralSet, PrimitiveIntegrals, PrimitiveS,
};
pub use scf::{run_rhf, run_rhf_with, ScfOptions, ScfResult};
pub use spin::{spin_orbital_integrals, SpinOrbitalIntegrals};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChemError {
    #[error("Boys function argument must be non-negative, got {0}")]
    NegativeBoysArgument(f64),
    #[error("nuclei {0} and {1} coincide")]
    DegenerateGeometry(usize, usize),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("basis parse error on line {line}: {msg}")]
    BasisParse { line: usize, msg: String },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("expected {expected} basis functions, got {got}")]
    BasisMismatch { expected: usize, got: usize },
    #[error("{n_electrons} electrons cannot be placed in {n_spatial} closed-shell orbitals")]
    ElectronCount { n_electrons: usize, n_spatial: usize },
    #[error("overlap matrix is not positive definite")]
    SingularOverlap,
}
