use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::system::{MolecularSystem, ReferenceOrdering};
use super::SolverError;
use crate::agent::argmax;
use crate::environment::{build_action_pool, fidelity_mode_rewards, ActionPool, FidelityLandscape};
use crate::qubits::{apply_rotation_pairs, exact_propagate, StateVector};
use crate::Complex64;

/// Time-stepping settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionConfig {
    pub t_max: f64,
    pub dt: f64,
    /// Maximum number of operators per time step.
    pub step_budget: usize,
    /// A step is accepted once `F ≥ fidelity_threshold`.
    pub fidelity_threshold: f64,
    /// Coordinate sweeps over all angles after each new operator.
    pub refit_sweeps: usize,
    /// Extra sweeps once the threshold is met.
    pub polish_sweeps: usize,
    /// Number of reference determinants in the initial superposition.
    pub n_superposed: usize,
    pub seed: u64,
    pub sz_filter: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_max: 20.0,
            dt: 0.05,
            step_budget: 20,
            fidelity_threshold: 1.0 - 1e-6,
            refit_sweeps: 20,
            polish_sweeps: 50,
            n_superposed: 4,
            seed: 0,
            sz_filter: true,
        }
    }
}

impl EvolutionConfig {
    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt + 1e-9).floor() as usize
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0) || !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(SolverError::Invalid("need dt > 0 and a finite t_max ≥ 0".into()));
        }
        if !(self.fidelity_threshold > 0.0 && self.fidelity_threshold <= 1.0) {
            return Err(SolverError::Invalid("fidelity threshold must lie in (0, 1]".into()));
        }
        if self.n_superposed == 0 {
            return Err(SolverError::Invalid("initial superposition needs at least one determinant".into()));
        }
        Ok(())
    }
}

/// One accepted time step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeStep {
    pub t: f64,
    /// Operator count M of the preparation circuit.
    pub step_count: usize,
    pub final_fidelity: f64,
    /// Fidelity after each added operator, refit included.
    pub fidelity_trace: Vec<f64>,
    pub failed: bool,
    /// `⟨H⟩` of the accepted state.
    pub energy_expectation: f64,
    /// Fidelity of the accepted state with the exact trajectory.
    pub reference_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionResult {
    pub initial_energy: f64,
    pub steps: Vec<TimeStep>,
}

impl EvolutionResult {
    pub fn failures(&self) -> usize {
        self.steps.iter().filter(|s| s.failed).count()
    }

    pub fn max_step_count(&self) -> usize {
        self.steps.iter().map(|s| s.step_count).max().unwrap_or(0)
    }

    pub fn min_fidelity(&self) -> f64 {
        self.steps.iter().map(|s| s.final_fidelity).fold(1.0, f64::min)
    }

    /// Largest `|⟨H⟩(t) − ⟨H⟩(0)|`.
    pub fn energy_drift(&self) -> f64 {
        self.steps.iter().map(|s| (s.energy_expectation - self.initial_energy).abs()).fold(0.0, f64::max)
    }

    /// Max M over the last quarter minus max M over the first quarter.
    pub fn depth_trend(&self) -> i64 {
        let n = self.steps.len();
        let q = n / 4;
        if q == 0 {
            return 0;
        }
        let max_of = |s: &[TimeStep]| s.iter().map(|x| x.step_count).max().unwrap_or(0) as i64;
        max_of(&self.steps[n - q..]) - max_of(&self.steps[..q])
    }
}

type Circuit = Vec<(usize, f64, f64)>;

fn prepare(start: &StateVector, pool: &ActionPool, circuit: &[(usize, f64, f64)]) -> StateVector {
    circuit.iter().fold(start.clone(), |s, &(a, t, p)| apply_rotation_pairs(&s, pool.pairs(a), t, p))
}

/// One coordinate sweep: each `(θ_j, φ_j)` in turn is set to its exact
/// maximizer with the others fixed. Returns the fidelity afterwards.
fn sweep(start: &StateVector, target: &StateVector, pool: &ActionPool, circuit: &mut Circuit) -> f64 {
    let m = circuit.len();
    // back[j] = (U_{j+1} ⋯ U_{M−1})† χ with the angles at sweep start
    let mut back = vec![target.clone(); m];
    for j in (0..m.saturating_sub(1)).rev() {
        let (a, t, p) = circuit[j + 1];
        back[j] = apply_rotation_pairs(&back[j + 1], pool.pairs(a), -t, p);
    }
    let mut front = start.clone();
    for j in 0..m {
        let (a, t, p) = circuit[j];
        let landscape = FidelityLandscape::new(&front, &back[j], pool.pairs(a));
        let (t_new, p_new, f_new) = landscape.maximize();
        if f_new > landscape.fidelity(t, p) {
            circuit[j] = (a, t_new, p_new);
        }
        let (_, t, p) = circuit[j];
        front = apply_rotation_pairs(&front, pool.pairs(a), t, p);
    }
    target.fidelity(&front)
}

/// Builds a circuit from `start` toward `target` by greedy best-fidelity
/// additions, refitting every angle after each one.
fn compress(
    start: &StateVector,
    target: &StateVector,
    pool: &ActionPool,
    config: &EvolutionConfig,
) -> Result<(Circuit, f64, Vec<f64>), SolverError> {
    let mut circuit = Circuit::new();
    let mut current = start.clone();
    let mut fidelity = target.fidelity(&current);
    let mut trace = Vec::new();
    while fidelity < config.fidelity_threshold && circuit.len() < config.step_budget {
        let rewards = fidelity_mode_rewards(&current, target, pool)?;
        let a = argmax(&rewards);
        let (t, p, _) = FidelityLandscape::new(&current, target, pool.pairs(a)).maximize();
        circuit.push((a, t, p));
        fidelity = target.fidelity(&prepare(start, pool, &circuit));
        for _ in 0..config.refit_sweeps {
            if fidelity >= config.fidelity_threshold {
                break;
            }
            fidelity = sweep(start, target, pool, &mut circuit);
        }
        current = prepare(start, pool, &circuit);
        trace.push(fidelity);
    }
    if fidelity >= config.fidelity_threshold {
        for _ in 0..config.polish_sweeps {
            let next = sweep(start, target, pool, &mut circuit);
            let gain = next - fidelity;
            fidelity = fidelity.max(next);
            if gain < 1e-15 {
                break;
            }
        }
    }
    Ok((circuit, fidelity.min(1.0), trace))
}

/// Seeded random complex superposition of the first `n_superposed`
/// reference determinants.
pub fn initial_superposition(
    system: &MolecularSystem,
    n_superposed: usize,
    seed: u64,
) -> Result<StateVector, SolverError> {
    let refs = system.references(n_superposed, ReferenceOrdering::ExcitationRank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << system.n_qubits()];
    for r in &refs {
        let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        for (a, x) in amps.iter_mut().zip(r.amplitudes()) {
            *a += c * x;
        }
    }
    Ok(StateVector::normalized(system.n_qubits(), amps)?)
}

/// Constant-depth real-time evolution.
///
/// Each step propagates the accepted state exactly by `dt` to get a target
/// and re-prepares that target from the Hartree-Fock ground determinant with
/// a fresh circuit of at most `step_budget` operators. A step whose circuit
/// stays below the threshold is flagged and the exact target is accepted.
pub fn evolve(
    system: &MolecularSystem,
    initial: &StateVector,
    config: &EvolutionConfig,
) -> Result<EvolutionResult, SolverError> {
    config.validate()?;
    let h = &system.hamiltonian;
    let pool = build_action_pool(system.n_qubits(), config.sz_filter)?;
    let start = system.hf_ground();
    let mut psi = initial.clone();
    let mut exact = initial.clone();
    let mut steps = Vec::with_capacity(config.n_steps());
    for i in 1..=config.n_steps() {
        let target = exact_propagate(h, &psi, config.dt);
        exact = exact_propagate(h, &exact, config.dt);
        let (circuit, fidelity, trace) = compress(&start, &target, &pool, config)?;
        let failed = fidelity < config.fidelity_threshold;
        psi = if failed { target } else { prepare(&start, &pool, &circuit) };
        steps.push(TimeStep {
            t: i as f64 * config.dt,
            step_count: circuit.len(),
            final_fidelity: fidelity,
            fidelity_trace: trace,
            failed,
            energy_expectation: h.expectation(&psi),
            reference_fidelity: exact.fidelity(&psi),
        });
    }
    Ok(EvolutionResult { initial_energy: h.expectation(initial), steps })
}
