//! One-dimensional minimization of 2π-periodic functions.

use std::f64::consts::PI;

/// Number of uniform samples on [−π, π) used to bracket the global minimum.
pub const BRACKET_SAMPLES: usize = 64;

/// Minimizes a 2π-periodic `f` over [−π, π).
///
/// Samples `samples` uniform points (θ = 0 among them when `samples` is even),
/// then refines the best sample with Brent's method inside its neighbouring
/// cells. The result never has a larger value than the best sample.
pub fn minimize_periodic(f: impl Fn(f64) -> f64, samples: usize, tol: f64) -> (f64, f64) {
    assert!(samples >= 3);
    let h = 2.0 * PI / samples as f64;
    let grid: Vec<f64> = (0..samples).map(|i| f(-PI + i as f64 * h)).collect();
    let mut best = 0;
    for (i, v) in grid.iter().enumerate() {
        if *v < grid[best] {
            best = i;
        }
    }
    let centre = -PI + best as f64 * h;
    let (x, fx) = brent(&f, centre - h, centre, centre + h, grid[best], tol);
    if fx < grid[best] {
        (wrap(x), fx)
    } else {
        (centre, grid[best])
    }
}

/// Maps an angle into [−π, π).
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

/// Brent's minimizer on `[a, b]` started from `x` with `f(x) = fx`.
fn brent(f: &impl Fn(f64) -> f64, mut a: f64, x0: f64, mut b: f64, fx0: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    const MAX_ITER: usize = 200;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let tol1 = f64::EPSILON.sqrt() * 1e-2 * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}
