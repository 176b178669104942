use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::chem::{build_integrals, run_rhf, spin_orbital_integrals, sto6g_basis, Geometry, IntegralSet, ScfResult};
use crate::environment::{normalize_weights, EnsembleState};
use crate::qubits::{
    exact_eigensystem, hf_reference_states, jw_hamiltonian, Eigensystem, QubitHamiltonian, Sector, StateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Molecule {
    /// Hydrogen molecule.
    H2,
    /// Linear equidistant H₃⁺.
    #[serde(rename = "h3p")]
    H3Plus,
}

impl Molecule {
    pub fn geometry(self, bond_angstrom: f64) -> Result<Geometry, SolverError> {
        Ok(match self {
            Molecule::H2 => Geometry::h2(bond_angstrom)?,
            Molecule::H3Plus => Geometry::h3_plus(bond_angstrom)?,
        })
    }
}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Molecule::H2 => "h2",
            Molecule::H3Plus => "h3p",
        })
    }
}

impl FromStr for Molecule {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "h2" => Ok(Molecule::H2),
            "h3p" | "h3+" => Ok(Molecule::H3Plus),
            other => Err(SolverError::Invalid(format!("unknown molecule '{other}' (expected h2 or h3p)"))),
        }
    }
}

/// How reference determinants are ranked before the `k` first are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceOrdering {
    /// Ground determinant, then singles, then doubles; diagonal energy within
    /// each rank, ties by label.
    #[default]
    ExcitationRank,
    /// Ascending diagonal energy, ties by label.
    DiagonalEnergy,
}

/// Everything derived from one geometry: integrals, SCF and qubit Hamiltonian.
#[derive(Debug, Clone)]
pub struct MolecularSystem {
    pub molecule: Molecule,
    pub bond_angstrom: f64,
    pub geometry: Geometry,
    pub integrals: IntegralSet,
    pub scf: ScfResult,
    pub hamiltonian: QubitHamiltonian,
    pub sector: Sector,
}

impl MolecularSystem {
    pub fn build(molecule: Molecule, bond_angstrom: f64) -> Result<Self, SolverError> {
        let geometry = molecule.geometry(bond_angstrom)?;
        let basis = sto6g_basis(&geometry)?;
        let integrals = build_integrals(&geometry, &basis)?;
        let scf = run_rhf(&integrals, geometry.n_electrons())?;
        if !scf.converged {
            return Err(SolverError::Invalid(format!("SCF did not converge for {molecule} at {bond_angstrom} Å")));
        }
        let spin = spin_orbital_integrals(&integrals, &scf);
        let hamiltonian = jw_hamiltonian(&spin, integrals.e_nuc)?;
        let sector = Sector::new(geometry.n_electrons(), 0);
        Ok(Self { molecule, bond_angstrom, geometry, integrals, scf, hamiltonian, sector })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    /// `k` reference determinants of the target sector in the given order.
    pub fn references(&self, k: usize, ordering: ReferenceOrdering) -> Result<Vec<StateVector>, SolverError> {
        let by_energy = hf_reference_states(&self.hamiltonian, self.sector, self.sector_size())?;
        if by_energy.len() < k {
            return Err(SolverError::Invalid(format!("sector holds only {} determinants", by_energy.len())));
        }
        if ordering == ReferenceOrdering::DiagonalEnergy {
            return Ok(by_energy.into_iter().take(k).collect());
        }
        let aufbau = self.aufbau_label();
        let label = |s: &StateVector| s.amplitudes().iter().position(|a| a.norm() > 0.5).expect("basis state");
        let mut labels: Vec<usize> = by_energy.iter().map(label).collect();
        // stable sort on top of the diagonal-energy order
        labels.sort_by_key(|&b| (b ^ aufbau).count_ones() / 2);
        Ok(labels.into_iter().take(k).map(|b| StateVector::basis(self.n_qubits(), b)).collect())
    }

    fn sector_size(&self) -> usize {
        self.sector.labels(self.n_qubits()).len()
    }

    /// Label of the aufbau determinant: the lowest `N` spin orbitals occupied.
    pub fn aufbau_label(&self) -> usize {
        (1usize << self.sector.n_electrons) - 1
    }

    /// Hartree-Fock ground determinant.
    pub fn hf_ground(&self) -> StateVector {
        StateVector::basis(self.n_qubits(), self.aufbau_label())
    }

    /// Reference ensemble with unnormalized `weights`, one member per weight.
    pub fn reference_ensemble(
        &self,
        weights: &[f64],
        ordering: ReferenceOrdering,
    ) -> Result<EnsembleState, SolverError> {
        normalize_weights(weights)?;
        Ok(EnsembleState::new(self.references(weights.len(), ordering)?, weights)?)
    }

    pub fn exact(&self) -> Eigensystem {
        exact_eigensystem(&self.hamiltonian, self.sector)
    }

    /// The `k` lowest exact sector energies.
    pub fn exact_energies(&self, k: usize) -> Vec<f64> {
        self.hamiltonian.spectrum().sector_values(self.sector).iter().take(k).copied().collect()
    }
}
