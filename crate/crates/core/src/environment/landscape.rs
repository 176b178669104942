//! Closed-form objective landscapes along a single sign-free rotation.
//!
//! With `v = Pψ` and `w = Aψ` the rotated state is `ψ − v + cos θ v + sin θ w`,
//! so energies are quadratic forms in `(1, cos θ, sin θ)` and overlaps are
//! affine in them. Only amplitudes on the pairs of the action enter.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use super::search::{minimize_periodic, wrap, BRACKET_SAMPLES};
use super::EnsembleState;
use crate::qubits::{QubitHamiltonian, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `f(θ) = k0 + kc cos θ + ks sin θ + kcc cos²θ + kss sin²θ + kcs cos θ sin θ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLandscape {
    pub k0: f64,
    pub kc: f64,
    pub ks: f64,
    pub kcc: f64,
    pub kss: f64,
    pub kcs: f64,
}

impl EnergyLandscape {
    /// Weighted ensemble energy along `e^{θ(γ − γ†)}`, given `Hψ_ν` per member.
    pub fn new(
        ensemble: &EnsembleState,
        h_psi: &[StateVector],
        h: &QubitHamiltonian,
        pairs: &[(usize, usize)],
    ) -> Self {
        let support: Vec<usize> = pairs.iter().flat_map(|&(b, t)| [b, t]).collect();
        let m = support.len();
        let hm = h.matrix();
        let mut sub = vec![ZERO; m * m];
        for (i, &si) in support.iter().enumerate() {
            for (j, &sj) in support.iter().enumerate() {
                sub[i * m + j] = hm[(si, sj)];
            }
        }
        let mut out = Self::default();
        let mut v = vec![ZERO; m];
        let mut w = vec![ZERO; m];
        for ((psi, hpsi), &weight) in ensemble.members().iter().zip(h_psi).zip(ensemble.weights()) {
            let x = psi.amplitudes();
            let hx = hpsi.amplitudes();
            for (i, &(b, t)) in pairs.iter().enumerate() {
                v[2 * i] = x[b];
                v[2 * i + 1] = x[t];
                w[2 * i] = -x[t];
                w[2 * i + 1] = x[b];
            }
            let (mut hvv, mut hww, mut hvw) = (ZERO, ZERO, ZERO);
            for i in 0..m {
                let (mut hv_i, mut hw_i) = (ZERO, ZERO);
                for j in 0..m {
                    hv_i += sub[i * m + j] * v[j];
                    hw_i += sub[i * m + j] * w[j];
                }
                hvv += v[i].conj() * hv_i;
                hww += w[i].conj() * hw_i;
                hvw += v[i].conj() * hw_i;
            }
            let (mut a, mut bw) = (ZERO, ZERO);
            for (i, &s) in support.iter().enumerate() {
                a += v[i].conj() * hx[s];
                bw += w[i].conj() * hx[s];
            }
            let e0 = psi.inner(hpsi).re;
            let (hvv, hww) = (hvv.re, hww.re);
            out.k0 += weight * (e0 - 2.0 * a.re + hvv);
            out.kc += weight * 2.0 * (a.re - hvv);
            out.ks += weight * 2.0 * (bw.re - hvw.re);
            out.kcc += weight * hvv;
            out.kss += weight * hww;
            out.kcs += weight * 2.0 * hvw.re;
        }
        out
    }

    pub fn value(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.k0 + self.kc * c + self.ks * s + self.kcc * c * c + self.kss * s * s + self.kcs * c * s
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        -self.kc * s + self.ks * c + (self.kss - self.kcc) * 2.0 * s * c + self.kcs * (c * c - s * s)
    }

    fn second_derivative(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        -self.kc * c - self.ks * s + (self.kss - self.kcc) * 2.0 * (c * c - s * s) - 4.0 * self.kcs * s * c
    }

    /// Global minimizer on [−π, π) with `f(θ*) ≤ f(0)`.
    pub fn minimize(&self, tol: f64) -> (f64, f64) {
        let f0 = self.value(0.0);
        let (mut theta, mut best) = minimize_periodic(|t| self.value(t), BRACKET_SAMPLES, tol);
        // Newton polish on the analytic derivative
        for _ in 0..4 {
            let d2 = self.second_derivative(theta);
            if d2 <= 0.0 {
                break;
            }
            let d1 = self.derivative(theta);
            let step = d1 / d2;
            let trial = wrap(theta - step);
            let ft = self.value(trial);
            if ft > best + 4.0 * f64::EPSILON * best.abs().max(1.0) || self.derivative(trial).abs() >= d1.abs() {
                break;
            }
            theta = trial;
            best = ft;
            if step.abs() < tol * 1e-2 {
                break;
            }
        }
        if best > f0 || (best == f0 && theta != 0.0) {
            (0.0, f0)
        } else {
            (theta, best)
        }
    }
}

/// Overlap `⟨χ|e^{θA(φ)}ψ⟩ = a + B x + C y + D z` with
/// `(x, y, z) = (cos θ, sin θ cos φ, sin θ sin φ)` on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityLandscape {
    pub a: Complex64,
    pub m: [Complex64; 3],
}

impl FidelityLandscape {
    pub fn new(psi: &StateVector, chi: &StateVector, pairs: &[(usize, usize)]) -> Self {
        let x = psi.amplitudes();
        let y = chi.amplitudes();
        let (mut b, mut c1, mut c2) = (ZERO, ZERO, ZERO);
        for &(lo, hi) in pairs {
            b += y[lo].conj() * x[lo] + y[hi].conj() * x[hi];
            c1 += y[hi].conj() * x[lo];
            c2 += y[lo].conj() * x[hi];
        }
        let a = chi.inner(psi) - b;
        Self { a, m: [b, c1 - c2, Complex64::i() * (c1 + c2)] }
    }

    pub fn overlap(&self, theta: f64, phase: f64) -> Complex64 {
        let (s, c) = theta.sin_cos();
        let (sp, cp) = phase.sin_cos();
        self.a + self.m[0] * c + self.m[1] * (s * cp) + self.m[2] * (s * sp)
    }

    pub fn fidelity(&self, theta: f64, phase: f64) -> f64 {
        self.overlap(theta, phase).norm_sqr()
    }

    /// Global maximizer `(θ, φ, F)`; `F(θ*, φ*) ≥ F(0, ·)`.
    ///
    /// `F = |a|² + 2gᵀr + rᵀQr` over unit `r`, solved through the secular
    /// equation of the sphere-constrained quadratic.
    pub fn maximize(&self) -> (f64, f64, f64) {
        let q = Matrix3::from_fn(|i, j| (self.m[i].conj() * self.m[j]).re);
        let g = Vector3::from_fn(|i, _| (self.a.conj() * self.m[i]).re);
        let r = sphere_quadratic_argmax(&q, &g);
        let theta = r[1].hypot(r[2]).atan2(r[0]);
        let phase = if r[1] == 0.0 && r[2] == 0.0 { 0.0 } else { r[2].atan2(r[1]) };
        let f = self.fidelity(theta, phase);
        let f0 = self.fidelity(0.0, 0.0);
        if f >= f0 {
            (wrap(theta), phase, f)
        } else {
            (0.0, 0.0, f0)
        }
    }
}

/// Unit vector maximizing `rᵀQr + 2gᵀr` for symmetric `Q`.
fn sphere_quadratic_argmax(q: &Matrix3<f64>, g: &Vector3<f64>) -> Vector3<f64> {
    let eig = SymmetricEigen::new(*q);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let lam: [f64; 3] = order.map(|i| eig.eigenvalues[i]);
    let vecs: [Vector3<f64>; 3] = order.map(|i| eig.eigenvectors.column(i).into_owned());
    let gam: [f64; 3] = vecs.map(|e| e.dot(g));
    let gnorm = g.norm();
    let scale = lam[0].abs().max(gnorm).max(1e-300);
    if gnorm <= 1e-300 {
        return vecs[0];
    }
    let secular = |mu: f64| -> f64 { (0..3).map(|i| (gam[i] / (mu - lam[i])).powi(2)).sum::<f64>() - 1.0 };
    let build = |mu: f64| -> Vector3<f64> {
        let mut r = Vector3::zeros();
        for i in 0..3 {
            r += vecs[i] * (gam[i] / (mu - lam[i]));
        }
        r
    };
    // hard case: the top-eigenvector component of g vanishes
    if gam[0].abs() <= 1e-14 * scale {
        let mut r = Vector3::zeros();
        for i in 1..3 {
            let gap = lam[0] - lam[i];
            if gap > 1e-14 * scale {
                r += vecs[i] * (gam[i] / gap);
            }
        }
        let rest = r.norm_squared();
        if rest <= 1.0 {
            let tau = (1.0 - rest).sqrt();
            let sign = if gam[0] < 0.0 { -1.0 } else { 1.0 };
            return r + vecs[0] * (sign * tau);
        }
    }
    let (mut lo, mut hi) = (lam[0], lam[0] + gnorm);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if secular(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = build(hi);
    r / r.norm()
}
