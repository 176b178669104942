use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spectrum::Spectrum;
use super::{parity_below, two_sz, QubitError, StateVector};
use crate::chem::SpinOrbitalIntegrals;

pub const MAX_QUBITS: usize = 12;

/// Particle-number and S_z quantum numbers. `two_sz` is 2·S_z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub n_electrons: usize,
    pub two_sz: i32,
}

impl Sector {
    pub fn new(n_electrons: usize, two_sz: i32) -> Self {
        Self { n_electrons, two_sz }
    }

    pub fn contains(&self, label: usize) -> bool {
        label.count_ones() as usize == self.n_electrons && two_sz(label) == self.two_sz
    }

    /// Basis labels in the sector, ascending.
    pub fn labels(&self, n_qubits: usize) -> Vec<usize> {
        (0..1usize << n_qubits).filter(|&b| self.contains(b)).collect()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_sz % 2 == 0 {
            write!(f, "N={}, S_z={}", self.n_electrons, self.two_sz / 2)
        } else {
            write!(f, "N={}, S_z={}/2", self.n_electrons, self.two_sz)
        }
    }
}

/// Dense Hermitian qubit Hamiltonian.
#[derive(Debug, Clone)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
    spectrum: OnceLock<Spectrum>,
}

impl QubitHamiltonian {
    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self, QubitError> {
        if n_qubits > MAX_QUBITS {
            return Err(QubitError::TooManyQubits(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QubitError::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { n_qubits, matrix, spectrum: OnceLock::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.map(|z| z * factor), spectrum: OnceLock::new() }
    }

    /// H|ψ⟩.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.n_qubits);
        let x = state.amplitudes();
        let y = out.amplitudes_mut();
        // column-major storage: accumulate column by column
        for (j, col) in self.matrix.column_iter().enumerate() {
            let xj = x[j];
            if xj.re == 0.0 && xj.im == 0.0 {
                continue;
            }
            for (yi, hij) in y.iter_mut().zip(col.iter()) {
                *yi += hij * xj;
            }
        }
        out
    }

    /// ⟨ψ|H|ψ⟩ (real part).
    pub fn expectation(&self, state: &StateVector) -> f64 {
        state.inner(&self.apply(state)).re
    }

    pub fn diagonal(&self, label: usize) -> f64 {
        self.matrix[(label, label)].re
    }

    /// Block eigendecomposition over all (N, S_z) sectors, computed once.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| Spectrum::new(self))
    }

    /// Largest matrix element coupling different (N, S_z) sectors.
    pub fn max_sector_leak(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                if i.count_ones() != j.count_ones() || two_sz(i) != two_sz(j) {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn max_hermiticity_violation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[inline]
fn annihilate(b: usize, p: usize) -> Option<(usize, f64)> {
    if b >> p & 1 == 0 {
        return None;
    }
    let sign = if parity_below(b, p) % 2 == 0 { 1.0 } else { -1.0 };
    Some((b ^ (1 << p), sign))
}

#[inline]
fn create(b: usize, p: usize) -> Option<(usize, f64)> {
    if b >> p & 1 == 1 {
        return None;
    }
    let sign = if parity_below(b, p) % 2 == 0 { 1.0 } else { -1.0 };
    Some((b | (1 << p), sign))
}

/// Jordan-Wigner image of `Σ h_pq c†_p c_q + ½ Σ ⟨pq|rs⟩ c†_p c†_q c_s c_r + e_nuc`.
pub fn jw_hamiltonian(integrals: &SpinOrbitalIntegrals, e_nuc: f64) -> Result<QubitHamiltonian, QubitError> {
    let n = integrals.n_spin_orbitals;
    if integrals.h.ncols() != n {
        return Err(QubitError::DimensionMismatch { expected: n, got: integrals.h.ncols() });
    }
    if n > MAX_QUBITS {
        return Err(QubitError::TooManyQubits(n));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        m[(b, b)] += e_nuc;
        for q in 0..n {
            let Some((b1, s1)) = annihilate(b, q) else { continue };
            for p in 0..n {
                let hpq = integrals.h[(p, q)];
                if hpq == 0.0 {
                    continue;
                }
                if let Some((b2, s2)) = create(b1, p) {
                    m[(b2, b)] += hpq * s1 * s2;
                }
            }
        }
        for r in 0..n {
            let Some((b1, s1)) = annihilate(b, r) else { continue };
            for s in 0..n {
                let Some((b2, s2)) = annihilate(b1, s) else { continue };
                for q in 0..n {
                    let Some((b3, s3)) = create(b2, q) else { continue };
                    for p in 0..n {
                        let g = integrals.g(p, q, r, s);
                        if g == 0.0 {
                            continue;
                        }
                        if let Some((b4, s4)) = create(b3, p) {
                            m[(b4, b)] += 0.5 * g * s1 * s2 * s3 * s4;
                        }
                    }
                }
            }
        }
    }
    QubitHamiltonian::from_matrix(n, m.map(|x| Complex64::new(x, 0.0)))
}

/// The `k` sector determinants with the lowest diagonal energy, ascending;
/// equal energies (within 1e-10) are ordered by basis label.
pub fn hf_reference_states(h: &QubitHamiltonian, sector: Sector, k: usize) -> Result<Vec<StateVector>, QubitError> {
    let mut labels = sector.labels(h.n_qubits());
    if labels.len() < k {
        return Err(QubitError::SectorTooSmall { sector, size: labels.len(), requested: k });
    }
    // stable sort keeps ascending labels among ties
    labels.sort_by(|&a, &b| {
        let (ea, eb) = (h.diagonal(a), h.diagonal(b));
        if (ea - eb).abs() < 1e-10 {
            std::cmp::Ordering::Equal
        } else {
            ea.total_cmp(&eb)
        }
    });
    Ok(labels.into_iter().take(k).map(|b| StateVector::basis(h.n_qubits(), b)).collect())
}
