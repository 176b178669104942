use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{two_sz, QubitHamiltonian, Sector, StateVector};

/// Eigendecomposition of one symmetry block.
#[derive(Debug, Clone)]
struct Block {
    sector: Sector,
    labels: Vec<usize>,
    values: Vec<f64>,
    /// Columns are eigenvectors over `labels`, in ascending eigenvalue order.
    vectors: DMatrix<Complex64>,
}

/// Exact spectrum of a number- and S_z-conserving Hamiltonian, stored per block.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_qubits: usize,
    blocks: Vec<Block>,
}

impl Spectrum {
    pub(crate) fn new(h: &QubitHamiltonian) -> Self {
        let n = h.n_qubits();
        let mut groups: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
        for b in 0..1usize << n {
            groups.entry((b.count_ones() as usize, two_sz(b))).or_default().push(b);
        }
        let blocks = groups
            .into_iter()
            .map(|((ne, tsz), labels)| {
                let d = labels.len();
                let sub = DMatrix::from_fn(d, d, |i, j| h.matrix()[(labels[i], labels[j])]);
                let sub = (&sub + sub.adjoint()).map(|z| z * 0.5);
                let eig = SymmetricEigen::new(sub);
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let mut vectors = DMatrix::zeros(d, d);
                let mut values = Vec::with_capacity(d);
                for (dst, &src) in order.iter().enumerate() {
                    let mut col = eig.eigenvectors.column(src).into_owned();
                    // fix the phase: largest component real and positive
                    let big = (0..d).max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm())).unwrap_or(0);
                    let phase = col[big].conj() / col[big].norm();
                    col *= phase;
                    vectors.set_column(dst, &col);
                    values.push(eig.eigenvalues[src]);
                }
                Block { sector: Sector::new(ne, tsz), labels, values, vectors }
            })
            .collect();
        Self { n_qubits: n, blocks }
    }

    fn block(&self, sector: Sector) -> Option<&Block> {
        self.blocks.iter().find(|b| b.sector == sector)
    }

    /// Eigenvalues of the sector, ascending. Empty if the sector is empty.
    pub fn sector_values(&self, sector: Sector) -> &[f64] {
        self.block(sector).map(|b| b.values.as_slice()).unwrap_or(&[])
    }

    /// Ascending eigenvalues over every sector with the given electron count.
    pub fn number_sector_values(&self, n_electrons: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .blocks
            .iter()
            .filter(|b| b.sector.n_electrons == n_electrons)
            .flat_map(|b| b.values.iter().copied())
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// e^{-iH dt}|ψ⟩.
    pub fn propagate(&self, state: &StateVector, dt: f64) -> StateVector {
        if dt == 0.0 {
            return state.clone();
        }
        let mut out = StateVector::zeros(self.n_qubits);
        let x = state.amplitudes();
        let y = out.amplitudes_mut();
        for block in &self.blocks {
            let d = block.labels.len();
            for j in 0..d {
                let mut c = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    c += block.vectors[(i, j)].conj() * x[block.labels[i]];
                }
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                c *= Complex64::from_polar(1.0, -block.values[j] * dt);
                for i in 0..d {
                    y[block.labels[i]] += block.vectors[(i, j)] * c;
                }
            }
        }
        out
    }
}

/// Sector eigenvalues (ascending) with eigenvectors embedded in the full space.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

pub fn exact_eigensystem(h: &QubitHamiltonian, sector: Sector) -> Eigensystem {
    let n = h.n_qubits();
    let Some(block) = h.spectrum().block(sector) else {
        return Eigensystem { values: Vec::new(), vectors: Vec::new() };
    };
    let vectors = (0..block.labels.len())
        .map(|j| {
            let mut s = StateVector::zeros(n);
            let amps = s.amplitudes_mut();
            for (i, &b) in block.labels.iter().enumerate() {
                amps[b] = block.vectors[(i, j)];
            }
            s
        })
        .collect();
    Eigensystem { values: block.values.clone(), vectors }
}

/// e^{-iH dt}|ψ⟩ using the cached block eigendecomposition of `h`.
pub fn exact_propagate(h: &QubitHamiltonian, state: &StateVector, dt: f64) -> StateVector {
    h.spectrum().propagate(state, dt)
}
