//! Restricted closed-shell Hartree-Fock with DIIS.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{ChemError, IntegralSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    pub max_iterations: usize,
    pub density_tolerance: f64,
    pub energy_tolerance: f64,
    /// DIIS extrapolation starts after this many plain Roothaan iterations.
    /// `None` disables DIIS.
    pub diis_start: Option<usize>,
    pub diis_subspace: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            density_tolerance: 1e-10,
            energy_tolerance: 1e-12,
            diis_start: Some(2),
            diis_subspace: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfResult {
    /// Columns are molecular orbitals in ascending energy order.
    pub mo_coefficients: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    /// Total energy including nuclear repulsion.
    pub e_hf: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Total energy after each iteration.
    pub energy_history: Vec<f64>,
    pub n_occupied: usize,
}

pub fn run_rhf(integrals: &IntegralSet, n_electrons: usize) -> Result<ScfResult, ChemError> {
    run_rhf_with(integrals, n_electrons, ScfOptions::default())
}

pub fn run_rhf_with(integrals: &IntegralSet, n_electrons: usize, options: ScfOptions) -> Result<ScfResult, ChemError> {
    let n = integrals.n_spatial;
    if n_electrons % 2 != 0 || n_electrons > 2 * n {
        return Err(ChemError::ElectronCount { n_electrons, n_spatial: n });
    }
    let n_occ = n_electrons / 2;
    let s = &integrals.overlap;
    let h = integrals.core_hamiltonian();
    let x = inverse_sqrt(s)?;

    let (mut eps, mut c) = diagonalize_fock(&h, &x);
    let mut d = density(&c, n_occ);
    let mut energy = f64::INFINITY;
    let mut history = Vec::new();
    let mut diis = Diis::new(options.diis_subspace);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=options.max_iterations {
        iterations = iter;
        let f = fock(integrals, &h, &d);
        let e_new = 0.5 * d.component_mul(&(&h + &f)).sum() + integrals.e_nuc;
        history.push(e_new);

        let f_used = match options.diis_start {
            Some(start) if iter > start => {
                let err = &f * &d * s - s * &d * &f;
                diis.push(f.clone(), err);
                diis.extrapolate().unwrap_or(f)
            }
            Some(_) => {
                let err = &f * &d * s - s * &d * &f;
                diis.push(f.clone(), err);
                f
            }
            None => f,
        };

        let (eps_new, c_new) = diagonalize_fock(&f_used, &x);
        let d_new = density(&c_new, n_occ);
        let d_change = (&d_new - &d).abs().max();
        let e_change = (e_new - energy).abs();
        eps = eps_new;
        c = c_new;
        d = d_new;
        energy = e_new;
        if d_change < options.density_tolerance && e_change < options.energy_tolerance {
            converged = true;
            break;
        }
    }

    // Energy of the final density; orbitals are eigenvectors of its Fock matrix.
    let f = fock(integrals, &h, &d);
    let e_hf = 0.5 * d.component_mul(&(&h + &f)).sum() + integrals.e_nuc;
    let (eps_final, c_final) = diagonalize_fock(&f, &x);
    if converged {
        eps = eps_final;
        c = c_final;
    }

    Ok(ScfResult {
        mo_coefficients: c,
        orbital_energies: eps,
        e_hf: if converged { e_hf } else { energy },
        converged,
        iterations,
        energy_history: history,
        n_occupied: n_occ,
    })
}

fn inverse_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>, ChemError> {
    let eig = SymmetricEigen::new(s.clone());
    if eig.eigenvalues.iter().any(|&v| v <= 1e-12) {
        return Err(ChemError::SingularOverlap);
    }
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.sqrt().recip()));
    Ok(&eig.eigenvectors * inv * eig.eigenvectors.transpose())
}

/// Solves FC = SCε in the orthogonal basis X. Orbitals are sorted by energy;
/// near-degenerate orbitals are ordered by the AO index of their dominant
/// coefficient and each orbital's dominant coefficient is made positive.
fn diagonalize_fock(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let fp = x.transpose() * f * x;
    let fp = (&fp + fp.transpose()) * 0.5;
    let eig = SymmetricEigen::new(fp);
    let c = x * &eig.eigenvectors;
    let n = c.ncols();

    let dominant = |j: usize| -> usize {
        let col = c.column(j);
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() + 1e-12 {
                best = i;
            }
        }
        best
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        if (ea - eb).abs() < 1e-10 {
            dominant(a).cmp(&dominant(b))
        } else {
            ea.partial_cmp(&eb).expect("finite orbital energies")
        }
    });

    let mut sorted = DMatrix::zeros(n, n);
    let mut energies = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = c.column(src).into_owned();
        if col[dominant(src)] < 0.0 {
            col.neg_mut();
        }
        sorted.set_column(dst, &col);
        energies[dst] = eig.eigenvalues[src];
    }
    (energies, sorted)
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    (&occ * occ.transpose()) * 2.0
}

fn fock(ints: &IntegralSet, h: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ints.n_spatial;
    let mut f = h.clone();
    for i in 0..n {
        for j in 0..n {
            let mut g = 0.0;
            for k in 0..n {
                for l in 0..n {
                    g += d[(k, l)] * (ints.eri.get(i, j, k, l) - 0.5 * ints.eri.get(i, k, j, l));
                }
            }
            f[(i, j)] += g;
        }
    }
    f
}

struct Diis {
    capacity: usize,
    focks: Vec<DMatrix<f64>>,
    errors: Vec<DMatrix<f64>>,
}

impl Diis {
    fn new(capacity: usize) -> Self {
        Self { capacity: capacity.max(2), focks: Vec::new(), errors: Vec::new() }
    }

    fn push(&mut self, f: DMatrix<f64>, e: DMatrix<f64>) {
        if self.focks.len() == self.capacity {
            self.focks.remove(0);
            self.errors.remove(0);
        }
        self.focks.push(f);
        self.errors.push(e);
    }

    fn extrapolate(&self) -> Option<DMatrix<f64>> {
        let m = self.focks.len();
        if m < 2 {
            return None;
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = self.errors[i].dot(&self.errors[j]);
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        // Error vectors vanish at convergence; fall back to the plain Fock matrix.
        let scale = (0..m).map(|i| b[(i, i)]).fold(0.0f64, f64::max);
        if scale < 1e-28 {
            return None;
        }
        let coef = b.lu().solve(&rhs)?;
        if coef.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let mut f = DMatrix::zeros(self.focks[0].nrows(), self.focks[0].ncols());
        for i in 0..m {
            f += &self.focks[i] * coef[i];
        }
        Some(f)
    }
}
