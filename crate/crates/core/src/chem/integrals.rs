//! Closed-form integrals over s-type Gaussians `exp(-α|r − A|²)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::geometry::distance2;
use super::{boys_f0, ChemError, ContractedSOrbital, Geometry};

/// Unnormalized s primitive: exponent and center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveS {
    pub exponent: f64,
    pub center: [f64; 3],
}

pub fn primitive_overlap(alpha: f64, a: &[f64; 3], beta: f64, b: &[f64; 3]) -> f64 {
    let p = alpha + beta;
    (PI / p).powf(1.5) * (-alpha * beta / p * distance2(a, b)).exp()
}

pub fn primitive_kinetic(alpha: f64, a: &[f64; 3], beta: f64, b: &[f64; 3]) -> f64 {
    let mu = alpha * beta / (alpha + beta);
    let r2 = distance2(a, b);
    mu * (3.0 - 2.0 * mu * r2) * primitive_overlap(alpha, a, beta, b)
}

fn gaussian_product_center(alpha: f64, a: &[f64; 3], beta: f64, b: &[f64; 3]) -> [f64; 3] {
    let p = alpha + beta;
    [(alpha * a[0] + beta * b[0]) / p, (alpha * a[1] + beta * b[1]) / p, (alpha * a[2] + beta * b[2]) / p]
}

/// Attraction to point charges `(Z, C)`; negative for positive charges.
pub fn primitive_nuclear(alpha: f64, a: &[f64; 3], beta: f64, b: &[f64; 3], nuclei: &[(f64, [f64; 3])]) -> f64 {
    let p = alpha + beta;
    let pc = gaussian_product_center(alpha, a, beta, b);
    let pre = 2.0 * PI / p * (-alpha * beta / p * distance2(a, b)).exp();
    nuclei.iter().map(|(z, c)| -z * pre * boys_f0(p * distance2(&pc, c)).expect("non-negative argument")).sum()
}

/// Two-electron repulsion (ab|cd) in chemist notation.
pub fn primitive_eri(a: PrimitiveS, b: PrimitiveS, c: PrimitiveS, d: PrimitiveS) -> f64 {
    let p = a.exponent + b.exponent;
    let q = c.exponent + d.exponent;
    let pc = gaussian_product_center(a.exponent, &a.center, b.exponent, &b.center);
    let qc = gaussian_product_center(c.exponent, &c.center, d.exponent, &d.center);
    let kab = (-a.exponent * b.exponent / p * distance2(&a.center, &b.center)).exp();
    let kcd = (-c.exponent * d.exponent / q * distance2(&c.center, &d.center)).exp();
    let rho = p * q / (p + q);
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt())
        * kab
        * kcd
        * boys_f0(rho * distance2(&pc, &qc)).expect("non-negative argument")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveIntegrals {
    pub overlap: f64,
    pub kinetic: f64,
    pub nuclear_attraction: Option<f64>,
    pub eri: Option<f64>,
}

/// All primitive integrals for a pair, optionally with nuclei and a second
/// pair for the repulsion integral (ab|cd).
pub fn primitive_s_integrals(
    a: PrimitiveS,
    b: PrimitiveS,
    nuclei: Option<&[(f64, [f64; 3])]>,
    others: Option<(PrimitiveS, PrimitiveS)>,
) -> PrimitiveIntegrals {
    PrimitiveIntegrals {
        overlap: primitive_overlap(a.exponent, &a.center, b.exponent, &b.center),
        kinetic: primitive_kinetic(a.exponent, &a.center, b.exponent, &b.center),
        nuclear_attraction: nuclei.map(|n| primitive_nuclear(a.exponent, &a.center, b.exponent, &b.center, n)),
        eri: others.map(|(c, d)| primitive_eri(a, b, c, d)),
    }
}

/// Dense rank-4 tensor of chemist-notation repulsion integrals (ij|kl).
#[derive(Debug, Clone, PartialEq)]
pub struct Eri {
    n: usize,
    data: Vec<f64>,
}

impl Eri {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }

    /// Writes `v` into all eight permutation images of (ij|kl).
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        for (a, b, c, d) in [
            (i, j, k, l),
            (j, i, k, l),
            (i, j, l, k),
            (j, i, l, k),
            (k, l, i, j),
            (l, k, i, j),
            (k, l, j, i),
            (l, k, j, i),
        ] {
            self.set(a, b, c, d, v);
        }
    }

    /// Row-major flat view.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest violation of the 8-fold permutation symmetry.
    pub fn max_symmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        for w in
                            [self.get(j, i, k, l), self.get(i, j, l, k), self.get(k, l, i, j), self.get(l, k, j, i)]
                        {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// AO integrals over a contracted s basis plus nuclear repulsion.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    pub n_spatial: usize,
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub potential: DMatrix<f64>,
    pub eri: Eri,
    pub e_nuc: f64,
}

impl IntegralSet {
    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.potential
    }
}

fn contract2(a: &ContractedSOrbital, b: &ContractedSOrbital, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut s = 0.0;
    for pa in a.primitives() {
        for pb in b.primitives() {
            s += pa.coefficient * pb.coefficient * f(pa.exponent, pb.exponent);
        }
    }
    s
}

pub fn build_integrals(geometry: &Geometry, basis: &[ContractedSOrbital]) -> Result<IntegralSet, ChemError> {
    let e_nuc = geometry.nuclear_repulsion()?;
    let n = basis.len();
    if n == 0 {
        return Err(ChemError::InvalidBasis("empty basis".into()));
    }
    let nuclei: Vec<(f64, [f64; 3])> = geometry.atoms().iter().map(|a| (a.atomic_number as f64, a.position)).collect();

    let mut overlap = DMatrix::zeros(n, n);
    let mut kinetic = DMatrix::zeros(n, n);
    let mut potential = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (a, b) = (&basis[i], &basis[j]);
            let (ca, cb) = (a.center(), b.center());
            let s = contract2(a, b, |x, y| primitive_overlap(x, ca, y, cb));
            let t = contract2(a, b, |x, y| primitive_kinetic(x, ca, y, cb));
            let v = contract2(a, b, |x, y| primitive_nuclear(x, ca, y, cb, &nuclei));
            overlap[(i, j)] = s;
            overlap[(j, i)] = s;
            kinetic[(i, j)] = t;
            kinetic[(j, i)] = t;
            potential[(i, j)] = v;
            potential[(j, i)] = v;
        }
    }

    let mut eri = Eri::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..n {
                for l in 0..=k {
                    let kl = k * (k + 1) / 2 + l;
                    if kl > ij {
                        continue;
                    }
                    let v = contracted_eri(&basis[i], &basis[j], &basis[k], &basis[l]);
                    eri.set_symmetric(i, j, k, l, v);
                }
            }
        }
    }

    Ok(IntegralSet { n_spatial: n, overlap, kinetic, potential, eri, e_nuc })
}

fn contracted_eri(
    a: &ContractedSOrbital,
    b: &ContractedSOrbital,
    c: &ContractedSOrbital,
    d: &ContractedSOrbital,
) -> f64 {
    let mut s = 0.0;
    for pa in a.primitives() {
        for pb in b.primitives() {
            for pc in c.primitives() {
                for pd in d.primitives() {
                    let coef = pa.coefficient * pb.coefficient * pc.coefficient * pd.coefficient;
                    s += coef
                        * primitive_eri(
                            PrimitiveS { exponent: pa.exponent, center: *a.center() },
                            PrimitiveS { exponent: pb.exponent, center: *b.center() },
                            PrimitiveS { exponent: pc.exponent, center: *c.center() },
                            PrimitiveS { exponent: pd.exponent, center: *d.center() },
                        );
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::sto6g_basis;

    fn prim(exponent: f64, center: [f64; 3]) -> PrimitiveS {
        PrimitiveS { exponent, center }
    }

    #[test]
    fn unit_overlap_value() {
        let s = primitive_overlap(1.0, &[0.0; 3], 1.0, &[0.0; 3]);
        assert!((s - 1.968_701_243_2).abs() < 1e-10);
        assert!((s - (PI / 2.0).powf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn overlap_symmetric_and_translation_invariant() {
        let a = [0.1, 0.2, -0.3];
        let b = [1.0, -0.5, 0.7];
        let s_ab = primitive_overlap(0.8, &a, 1.7, &b);
        let s_ba = primitive_overlap(1.7, &b, 0.8, &a);
        assert_eq!(s_ab, s_ba);
        let shift = |x: [f64; 3]| [x[0] + 3.0, x[1] - 2.0, x[2] + 0.25];
        let s_shift = primitive_overlap(0.8, &shift(a), 1.7, &shift(b));
        assert!((s_ab - s_shift).abs() < 1e-14);
    }

    // Coulomb self-energy of the concentric density exp(-2α r²), reduced to
    // radial quadrature through the shell theorem. Independent of Boys.
    fn concentric_eri_by_quadrature(alpha: f64) -> f64 {
        let p = 2.0 * alpha;
        let rho = |r: f64| (-p * r * r).exp();
        let rmax = 12.0 / p.sqrt();
        let n = 4000;
        let h = rmax / n as f64;
        // enclosed(r) = ∫0^r ρ r'^2 dr', outer(r) = ∫r^∞ ρ r' dr' (closed form)
        let outer = |r: f64| (-p * r * r).exp() / (2.0 * p);
        let mut enclosed = vec![0.0; n + 1];
        for i in 1..=n {
            let (r0, r1) = ((i - 1) as f64 * h, i as f64 * h);
            let rm = 0.5 * (r0 + r1);
            let f = |r: f64| rho(r) * r * r;
            enclosed[i] = enclosed[i - 1] + h / 6.0 * (f(r0) + 4.0 * f(rm) + f(r1));
        }
        let potential = |i: usize| {
            let r = i as f64 * h;
            if i == 0 {
                4.0 * PI * outer(0.0)
            } else {
                4.0 * PI * (enclosed[i] / r + outer(r))
            }
        };
        // ∫ ρ(r) Φ(r) 4π r² dr by Simpson on the grid
        let mut s = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * rho(r) * potential(i) * 4.0 * PI * r * r;
        }
        s * h / 3.0
    }

    #[test]
    fn concentric_eri_matches_quadrature() {
        let c = [0.3, 0.0, -1.0];
        let v = primitive_eri(prim(1.0, c), prim(1.0, c), prim(1.0, c), prim(1.0, c));
        let oracle = concentric_eri_by_quadrature(1.0);
        assert!((v - oracle).abs() < 1e-4, "{v} vs {oracle}");
        // (π/2)^{3}·(2/√π)·√(p/2) closed form for equal exponents
        assert!((v - PI.powf(2.5) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn record_fills_optional_parts() {
        let a = prim(0.5, [0.0; 3]);
        let b = prim(0.9, [0.0, 0.0, 1.0]);
        let nuclei = [(1.0, [0.0; 3])];
        let r = primitive_s_integrals(a, b, Some(&nuclei), Some((a, b)));
        assert!(r.nuclear_attraction.unwrap() < 0.0);
        assert!(r.eri.unwrap() > 0.0);
        let bare = primitive_s_integrals(a, b, None, None);
        assert!(bare.nuclear_attraction.is_none() && bare.eri.is_none());
        assert_eq!(bare.overlap, r.overlap);
    }

    fn assert_close(m: &DMatrix<f64>, reference: &[[f64; 2]; 2], tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - reference[i][j]).abs() < tol, "({i},{j}) {}", m[(i, j)]);
            }
        }
    }

    // Reference AO integrals from an established quantum-chemistry package
    // (STO-6G, 0.7 Å).
    #[test]
    fn h2_matches_reference_package() {
        let g = Geometry::h2(0.7).unwrap();
        let ints = build_integrals(&g, &sto6g_basis(&g).unwrap()).unwrap();
        assert_close(&ints.overlap, &[[1.0, 0.6859366001450999], [0.6859366001450999, 1.0]], 1e-9);
        assert_close(
            &ints.kinetic,
            &[[0.7685221550522104, 0.2598836564719003], [0.2598836564719003, 0.7685221550522104]],
            1e-9,
        );
        assert_close(
            &ints.potential,
            &[[-1.9204586571157682, -1.269677433891796], [-1.269677433891796, -1.9204586571157682]],
            1e-9,
        );
        assert!((ints.eri.get(0, 0, 0, 0) - 0.774998521297643).abs() < 1e-9);
        assert!((ints.eri.get(0, 0, 1, 1) - 0.585138229981871).abs() < 1e-9);
        assert!((ints.eri.get(0, 1, 0, 1) - 0.324554569033569).abs() < 1e-9);
        assert!((ints.eri.get(0, 0, 0, 1) - 0.467450775253427).abs() < 1e-9);
        assert!((ints.e_nuc - 0.755967444171429).abs() < 1e-9);
    }

    #[test]
    fn symmetry_and_normalization() {
        let g = Geometry::h3_plus(1.7).unwrap();
        let ints = build_integrals(&g, &sto6g_basis(&g).unwrap()).unwrap();
        for i in 0..3 {
            assert!((ints.overlap[(i, i)] - 1.0).abs() < 1e-10);
        }
        assert!((ints.overlap[(0, 1)] - ints.overlap[(1, 2)]).abs() < 1e-12);
        assert!((&ints.overlap - ints.overlap.transpose()).abs().max() == 0.0);
        assert!(ints.eri.max_symmetry_violation() < 1e-12);
        assert!(ints.e_nuc > 0.0);
        assert!(ints.overlap.clone().cholesky().is_some());
    }

    #[test]
    fn degenerate_geometry() {
        let g = Geometry::h2(0.0).unwrap();
        let basis = sto6g_basis(&g).unwrap();
        assert!(matches!(build_integrals(&g, &basis), Err(ChemError::DegenerateGeometry(0, 1))));
    }
}
