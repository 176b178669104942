use super::ChemError;

// Below this argument the Taylor series is used; both branches agree to
// machine precision here.
const SERIES_THRESHOLD: f64 = 0.05;

/// Zeroth-order Boys function F0(x) = ∫₀¹ exp(-x t²) dt.
pub fn boys_f0(x: f64) -> Result<f64, ChemError> {
    if !(x >= 0.0) {
        return Err(ChemError::NegativeBoysArgument(x));
    }
    if x < SERIES_THRESHOLD {
        Ok(series(x))
    } else {
        Ok(closed_form(x))
    }
}

// F0(x) = Σ (-x)^k / (k! (2k+1))
fn series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= -x / k as f64;
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn closed_form(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI / x).sqrt() * libm::erf(x.sqrt())
}
