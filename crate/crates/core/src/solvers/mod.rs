//! End-to-end drivers: excited-state solves, geometry scans and constant-depth
//! time evolution.

mod evolve;
mod excited;
mod scan;
mod system;

pub use evolve::{evolve, initial_superposition, EvolutionConfig, EvolutionResult, TimeStep};
pub use excited::{
    evaluate_excited, evaluate_from, subspace_diagonalize, train_excited, ExcitedStateResult, LearningCurve, Policy,
    SolverSettings, TrainingOptions,
};
pub use scan::{
    bond_grid, evolution_csv, operator_records, scan, scan_csv, OperatorRecord, ScanPoint, ScanPolicy,
    EVOLUTION_CSV_HEADER, SCAN_CSV_HEADER,
};
pub use system::{MolecularSystem, Molecule, ReferenceOrdering};

use thiserror::Error;

use crate::chem::ChemError;
use crate::environment::EnvError;
use crate::qubits::QubitError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Qubit(#[from] QubitError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] crate::agent::AgentError),
    #[error("{0}")]
    Invalid(String),
}
