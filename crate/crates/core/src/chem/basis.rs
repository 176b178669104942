use super::integrals::primitive_overlap;
use super::{ChemError, Geometry};

const STO6G_H: &str = include_str!("../../data/sto-6g-h.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    /// Gaussian exponent in bohr⁻².
    pub exponent: f64,
    /// Coefficient multiplying the normalized primitive.
    pub coefficient: f64,
}

/// Normalized contraction of s-type Gaussians on one center.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedSOrbital {
    center: [f64; 3],
    primitives: Vec<Primitive>,
}

impl ContractedSOrbital {
    /// Builds the contraction and rescales the coefficients so that the
    /// orbital has unit norm. Coefficients in the result already include the
    /// primitive normalization (2α/π)^{3/4}.
    pub fn new(center: [f64; 3], shell: &[Primitive]) -> Result<Self, ChemError> {
        if shell.is_empty() {
            return Err(ChemError::InvalidBasis("empty contraction".into()));
        }
        if let Some(p) = shell.iter().find(|p| !(p.exponent > 0.0) || !p.coefficient.is_finite()) {
            return Err(ChemError::InvalidBasis(format!("bad primitive {p:?}")));
        }
        let mut primitives: Vec<Primitive> = shell
            .iter()
            .map(|p| Primitive { exponent: p.exponent, coefficient: p.coefficient * primitive_norm(p.exponent) })
            .collect();
        let mut self_overlap = 0.0;
        for a in &primitives {
            for b in &primitives {
                self_overlap +=
                    a.coefficient * b.coefficient * primitive_overlap(a.exponent, &center, b.exponent, &center);
            }
        }
        if !(self_overlap > 0.0) {
            return Err(ChemError::InvalidBasis("contraction has zero norm".into()));
        }
        let scale = self_overlap.sqrt().recip();
        for p in &mut primitives {
            p.coefficient *= scale;
        }
        Ok(Self { center, primitives })
    }

    pub fn center(&self) -> &[f64; 3] {
        &self.center
    }

    /// Primitives with absolute (normalization-included) coefficients.
    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }
}

fn primitive_norm(alpha: f64) -> f64 {
    (2.0 * alpha / std::f64::consts::PI).powf(0.75)
}

/// Parses a basis text file: `exponent coefficient` per line, shells
/// separated by blank lines, `#` starts a comment.
pub fn parse_basis(text: &str) -> Result<Vec<Vec<Primitive>>, ChemError> {
    let mut shells = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            // Comment-only lines do not terminate a shell.
            if raw.trim().is_empty() && !current.is_empty() {
                shells.push(std::mem::take(&mut current));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ChemError::BasisParse {
                line: i + 1,
                msg: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.replace(['D', 'd'], "e")
                .parse::<f64>()
                .map_err(|e| ChemError::BasisParse { line: i + 1, msg: format!("{s}: {e}") })
        };
        let exponent = parse(fields[0])?;
        let coefficient = parse(fields[1])?;
        if !(exponent > 0.0) {
            return Err(ChemError::BasisParse { line: i + 1, msg: "exponent must be positive".into() });
        }
        current.push(Primitive { exponent, coefficient });
    }
    if !current.is_empty() {
        shells.push(current);
    }
    Ok(shells)
}

/// The checked-in STO-6G hydrogen 1s shell.
pub fn sto6g_hydrogen() -> Vec<Primitive> {
    let mut shells = parse_basis(STO6G_H).expect("bundled basis file is valid");
    shells.remove(0)
}

/// One STO-6G 1s function per hydrogen atom of `geometry`.
pub fn sto6g_basis(geometry: &Geometry) -> Result<Vec<ContractedSOrbital>, ChemError> {
    let shell = sto6g_hydrogen();
    geometry
        .atoms()
        .iter()
        .map(|a| {
            if a.atomic_number != 1 {
                return Err(ChemError::InvalidBasis(format!("no STO-6G data for Z = {}", a.atomic_number)));
            }
            ContractedSOrbital::new(a.position, &shell)
        })
        .collect()
}
