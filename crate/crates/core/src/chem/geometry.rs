use super::ChemError;
use crate::angstrom_to_bohr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub atomic_number: u32,
    /// Position in bohr.
    pub position: [f64; 3],
}

/// Nuclear framework plus total charge. Positions are stored in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    atoms: Vec<Atom>,
    charge: i32,
    n_electrons: usize,
}

impl Geometry {
    pub fn new(atoms: Vec<Atom>, charge: i32) -> Result<Self, ChemError> {
        if atoms.is_empty() {
            return Err(ChemError::InvalidGeometry("no atoms".into()));
        }
        if atoms.iter().any(|a| a.position.iter().any(|c| !c.is_finite())) {
            return Err(ChemError::InvalidGeometry("non-finite coordinate".into()));
        }
        let z: i64 = atoms.iter().map(|a| a.atomic_number as i64).sum();
        let n = z - charge as i64;
        if n < 0 {
            return Err(ChemError::InvalidGeometry(format!("negative electron count {n}")));
        }
        if n % 2 != 0 {
            return Err(ChemError::InvalidGeometry(format!("{n} electrons: only closed-shell systems are supported")));
        }
        Ok(Self { atoms, charge, n_electrons: n as usize })
    }

    /// H₂ along z with the given bond length in Ångström.
    pub fn h2(bond_angstrom: f64) -> Result<Self, ChemError> {
        Self::hydrogen_chain(2, bond_angstrom, 0)
    }

    /// Linear equidistant H₃⁺ along z with nearest-neighbour distance in Ångström.
    pub fn h3_plus(bond_angstrom: f64) -> Result<Self, ChemError> {
        Self::hydrogen_chain(3, bond_angstrom, 1)
    }

    fn hydrogen_chain(n: usize, bond_angstrom: f64, charge: i32) -> Result<Self, ChemError> {
        let r = angstrom_to_bohr(bond_angstrom);
        let atoms = (0..n).map(|i| Atom { atomic_number: 1, position: [0.0, 0.0, i as f64 * r] }).collect();
        Self::new(atoms, charge)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn charge(&self) -> i32 {
        self.charge
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Σ_{i<j} Z_i Z_j / |R_i − R_j| in hartree.
    pub fn nuclear_repulsion(&self) -> Result<f64, ChemError> {
        let mut e = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for (j, b) in self.atoms.iter().enumerate().skip(i + 1) {
                let r = distance(&a.position, &b.position);
                if r < 1e-8 {
                    return Err(ChemError::DegenerateGeometry(i, j));
                }
                e += (a.atomic_number * b.atomic_number) as f64 / r;
            }
        }
        Ok(e)
    }
}

pub(crate) fn distance2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    distance2(a, b).sqrt()
}
