use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::evolve::EvolutionResult;
use super::excited::{evaluate_excited, train_excited, ExcitedStateResult, Policy, SolverSettings, TrainingOptions};
use super::system::{MolecularSystem, Molecule};
use super::SolverError;
use crate::agent::TrainConfig;

/// Policy of a scan; DQN trains a fresh agent per geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScanPolicy {
    Lookahead { width: usize },
    Dqn { config: TrainConfig, options: TrainingOptions },
}

/// One geometry of a scan.
#[derive(Debug)]
pub struct ScanPoint {
    pub bond_angstrom: f64,
    pub result: Result<ExcitedStateResult, SolverError>,
}

/// `points` bond lengths evenly spaced over `[min, max]`.
pub fn bond_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, SolverError> {
    if points == 0 || !(min <= max) || !(min > 0.0) || !max.is_finite() {
        return Err(SolverError::Invalid("bond grid needs 0 < min ≤ max and at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { max } else { min + step * i as f64 }).collect())
}

fn solve_point(
    molecule: Molecule,
    bond: f64,
    weights: &[f64],
    settings: &SolverSettings,
    policy: &ScanPolicy,
) -> Result<ExcitedStateResult, SolverError> {
    let system = MolecularSystem::build(molecule, bond)?;
    match policy {
        ScanPolicy::Lookahead { width } => {
            evaluate_excited(Policy::Lookahead { width: *width }, &system, weights, settings)
        }
        ScanPolicy::Dqn { config, options } => {
            let (agent, _) = train_excited(&system, weights, settings, config, options)?;
            evaluate_excited(Policy::Dqn(&agent), &system, weights, settings)
        }
    }
}

/// Independent solves over `grid`, `jobs` at a time, returned in grid order.
pub fn scan(
    molecule: Molecule,
    grid: &[f64],
    weights: &[f64],
    settings: &SolverSettings,
    policy: &ScanPolicy,
    jobs: usize,
) -> Result<Vec<ScanPoint>, SolverError> {
    if grid.is_empty() {
        return Err(SolverError::Invalid("empty bond grid".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SolverError::Invalid(e.to_string()))?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&bond| ScanPoint {
                bond_angstrom: bond,
                result: solve_point(molecule, bond, weights, settings, policy),
            })
            .collect()
    }))
}

pub const SCAN_CSV_HEADER: &str = "bond_angstrom,state_index,energy_hartree,energy_exact_hartree,abs_error,n_operators";

pub const EVOLUTION_CSV_HEADER: &str = "t,step_count,final_fidelity,energy_expectation";

/// Scan rows for every successful geometry, in grid order.
pub fn scan_csv(points: &[ScanPoint]) -> String {
    let mut out = format!("{SCAN_CSV_HEADER}\n");
    for p in points {
        if let Ok(r) = &p.result {
            for (i, (e, x)) in r.energies.iter().zip(&r.energies_exact).enumerate() {
                writeln!(out, "{},{},{:?},{:?},{:?},{}", p.bond_angstrom, i, e, x, (e - x).abs(), r.n_operators())
                    .unwrap();
            }
        }
    }
    out
}

pub fn evolution_csv(result: &EvolutionResult) -> String {
    let mut out = format!("{EVOLUTION_CSV_HEADER}\n");
    for s in &result.steps {
        writeln!(out, "{:?},{},{:?},{:?}", s.t, s.step_count, s.final_fidelity, s.energy_expectation).unwrap();
    }
    out
}

/// One entry of an operator-sequence dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorRecord {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub l: usize,
    pub theta: f64,
}

pub fn operator_records(result: &ExcitedStateResult) -> Vec<OperatorRecord> {
    result
        .operator_sequence
        .iter()
        .map(|(a, theta)| OperatorRecord { p: a.p, q: a.q, k: a.k, l: a.l, theta: *theta })
        .collect()
}
