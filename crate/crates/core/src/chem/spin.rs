use nalgebra::DMatrix;

use super::{IntegralSet, ScfResult};

/// Spin-orbital integrals in the MO basis.
///
/// Spin orbitals are interleaved: index `2i` is spatial orbital `i` with α
/// spin and `2i + 1` the same orbital with β spin. Two-electron integrals are
/// stored in physicist notation, `g[p,q,r,s] = ⟨pq|rs⟩ = (pr|qs)`, so that
/// `H = Σ h_pq c†_p c_q + ½ Σ ⟨pq|rs⟩ c†_p c†_q c_s c_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    pub n_spin_orbitals: usize,
    pub h: DMatrix<f64>,
    g: Vec<f64>,
}

impl SpinOrbitalIntegrals {
    pub fn new(h: DMatrix<f64>, g: Vec<f64>) -> Self {
        let n = h.nrows();
        assert_eq!(g.len(), n.pow(4), "two-electron tensor has wrong size");
        Self { n_spin_orbitals: n, h, g }
    }

    /// ⟨pq|rs⟩.
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spin_orbitals;
        self.g[((p * n + q) * n + r) * n + s]
    }

    /// Energy of the determinant occupying the given spin orbitals, without
    /// nuclear repulsion.
    pub fn determinant_energy(&self, occupied: &[usize]) -> f64 {
        let mut e = 0.0;
        for &i in occupied {
            e += self.h[(i, i)];
            for &j in occupied {
                e += 0.5 * (self.g(i, j, i, j) - self.g(i, j, j, i));
            }
        }
        e
    }
}

pub fn spin_orbital_integrals(integrals: &IntegralSet, scf: &ScfResult) -> SpinOrbitalIntegrals {
    let n = integrals.n_spatial;
    let c = &scf.mo_coefficients;
    let h_mo = c.transpose() * integrals.core_hamiltonian() * c;

    // (pq|rs) in the MO basis by four quarter transformations.
    let idx = |a: usize, b: usize, cc: usize, d: usize| ((a * n + b) * n + cc) * n + d;
    let mut t1 = vec![0.0; n.pow(4)];
    for p in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    t1[idx(p, j, k, l)] = (0..n).map(|i| c[(i, p)] * integrals.eri.get(i, j, k, l)).sum();
                }
            }
        }
    }
    let mut t2 = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for k in 0..n {
                for l in 0..n {
                    t2[idx(p, q, k, l)] = (0..n).map(|j| c[(j, q)] * t1[idx(p, j, k, l)]).sum();
                }
            }
        }
    }
    let mut t3 = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for l in 0..n {
                    t3[idx(p, q, r, l)] = (0..n).map(|k| c[(k, r)] * t2[idx(p, q, k, l)]).sum();
                }
            }
        }
    }
    let mut mo = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    mo[idx(p, q, r, s)] = (0..n).map(|l| c[(l, s)] * t3[idx(p, q, r, l)]).sum();
                }
            }
        }
    }

    let ns = 2 * n;
    let mut h = DMatrix::zeros(ns, ns);
    for p in 0..ns {
        for q in 0..ns {
            if p % 2 == q % 2 {
                h[(p, q)] = h_mo[(p / 2, q / 2)];
            }
        }
    }
    let mut g = vec![0.0; ns.pow(4)];
    for p in 0..ns {
        for q in 0..ns {
            for r in 0..ns {
                if p % 2 != r % 2 {
                    continue;
                }
                for s in 0..ns {
                    if q % 2 != s % 2 {
                        continue;
                    }
                    g[((p * ns + q) * ns + r) * ns + s] = mo[idx(p / 2, r / 2, q / 2, s / 2)];
                }
            }
        }
    }
    SpinOrbitalIntegrals::new(h, g)
}
