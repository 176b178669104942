//! Oracle checks shared by the integration and acceptance targets.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rlcqe::agent::{backward_and_update, sync_target, AdamW, QNetwork, Transition};
use rlcqe::chem::{build_integrals, run_rhf, spin_orbital_integrals, sto6g_basis, Geometry};
use rlcqe::environment::{build_action_pool, compute_rl_state, ensemble_energy, step_energy_mode, EnvConfig, RLState};
use rlcqe::qubits::{apply_rotation, apply_sign_free_exponential, QubitOperatorAction, StateVector};
use rlcqe::solvers::{MolecularSystem, Molecule, ReferenceOrdering};
use rlcqe::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Single-qubit operator `m` on qubit `j` of `n`, with bit `j` of a basis
/// label addressing qubit `j`.
pub fn embed(m: &CMat, j: usize, n: usize) -> CMat {
    let id = CMat::identity(2, 2);
    let mut out = CMat::identity(1, 1);
    for site in (0..n).rev() {
        out = out.kronecker(if site == j { m } else { &id });
    }
    out
}

/// `|1⟩⟨0|` on qubit `j`.
pub fn raise(j: usize, n: usize) -> CMat {
    embed(&CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]), j, n)
}

pub fn lower(j: usize, n: usize) -> CMat {
    raise(j, n).adjoint()
}

pub fn gamma_matrix(a: &QubitOperatorAction, n: usize) -> CMat {
    raise(a.p, n) * raise(a.q, n) * lower(a.k, n) * lower(a.l, n)
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1usize << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    StateVector::normalized(n, amps).unwrap()
}

pub fn dense_apply(m: &CMat, s: &StateVector) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    (m * v).iter().copied().collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub struct ExpmReport {
    pub checked: usize,
    pub overlapping: usize,
    pub max_error: f64,
}

/// Closed-form rotations against dense `expm`, `per_pool` random triples
/// (action, angle, state) for each register size and pool.
pub fn expm_comparison(per_pool: usize, seed: u64) -> ExpmReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ExpmReport { checked: 0, overlapping: 0, max_error: 0.0 };
    for n in [4, 6] {
        for filtered in [false, true] {
            let pool = build_action_pool(n, filtered).unwrap();
            let gammas: Vec<CMat> = pool.actions().iter().map(|a| gamma_matrix(a, n)).collect();
            for _ in 0..per_pool {
                let i = rng.random_range(0..pool.len());
                let a = pool.actions()[i];
                let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let phase = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let psi = random_state(n, &mut rng);
                let e = Complex64::from_polar(1.0, phase);
                let generator = gammas[i].map(|x| x * e) - gammas[i].adjoint().map(|x| x * e.conj());
                let want = dense_apply(&generator.map(|x| x * theta).exp(), &psi);
                let got = apply_rotation(&psi, &a, theta, phase);
                let real = apply_sign_free_exponential(&psi, &a, theta);
                let g0 = &gammas[i] - gammas[i].adjoint();
                let want0 = dense_apply(&g0.map(|x| x * theta).exp(), &psi);
                let err = max_diff(got.amplitudes(), &want).max(max_diff(real.amplitudes(), &want0));
                report.max_error = report.max_error.max(err);
                report.overlapping += [a.p, a.q].iter().any(|x| *x == a.k || *x == a.l) as usize;
                report.checked += 1;
            }
        }
    }
    report
}

fn param_mut(net: &mut QNetwork, mut index: usize) -> &mut f64 {
    for layer in net.layers_mut() {
        let n = layer.weight.len();
        if index < n {
            return &mut layer.weight[index];
        }
        index -= n;
        if index < layer.bias.len() {
            return &mut layer.bias[index];
        }
        index -= layer.bias.len();
    }
    panic!("parameter index out of range")
}

/// Largest `|analytic − numeric| / max(|analytic|, 1)` over every parameter
/// of a two-layer network.
pub fn gradient_check(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = QNetwork::new(&[3, 7, 4], &mut rng).unwrap();
    let rows = 5;
    let x: Vec<f64> = (0..rows * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dout: Vec<f64> = (0..rows * 4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let objective =
        |net: &QNetwork| -> f64 { net.forward_batch(&x, rows).unwrap().iter().zip(&dout).map(|(o, d)| o * d).sum() };
    let (_, grads) = net.backward(&x, rows, |_| dout.clone()).unwrap();
    let analytic: Vec<f64> =
        grads.weight.iter().zip(&grads.bias).flat_map(|(w, b)| w.iter().chain(b).copied()).collect();
    assert_eq!(analytic.len(), net.n_parameters());
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (i, &g) in analytic.iter().enumerate() {
        let saved = *param_mut(&mut net, i);
        *param_mut(&mut net, i) = saved + h;
        let up = objective(&net);
        *param_mut(&mut net, i) = saved - h;
        let down = objective(&net);
        *param_mut(&mut net, i) = saved;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - g).abs() / g.abs().max(1.0));
    }
    worst
}

pub fn one_hot(i: usize, n: usize) -> RLState {
    let mut f = vec![0.0; n];
    f[i] = 1.0;
    RLState::new(f)
}

/// Bellman regression of a linear network on one-hot states (a Q table) for a
/// four-state chain; returns the largest deviation from value iteration.
pub fn tabular_bellman_error() -> f64 {
    // action 0 stays, action 1 advances; leaving state 2 ends the episode
    let (n_states, n_actions, discount) = (4, 2, 0.5);
    let reward = |s: usize, a: usize| if a == 1 { [0.1, -0.2, 1.0, 0.0][s] } else { -0.05 * s as f64 };
    let next = |s: usize, a: usize| if a == 1 { (s + 1).min(3) } else { s };
    let terminal = |s: usize, a: usize| a == 1 && s == 2;
    let mut q = vec![[0.0f64; 2]; n_states];
    for _ in 0..200 {
        let prev = q.clone();
        for s in 0..n_states - 1 {
            for a in 0..n_actions {
                let n = next(s, a);
                let tail = if terminal(s, a) { 0.0 } else { discount * prev[n][0].max(prev[n][1]) };
                q[s][a] = reward(s, a) + tail;
            }
        }
    }
    let owned: Vec<Transition> = (0..n_states - 1)
        .flat_map(|s| (0..n_actions).map(move |a| (s, a)))
        .map(|(s, a)| Transition {
            state: one_hot(s, n_states),
            action_index: a,
            reward: reward(s, a),
            next_state: one_hot(next(s, a), n_states),
            terminal: terminal(s, a),
        })
        .collect();
    let batch: Vec<&Transition> = owned.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut net = QNetwork::new(&[n_states, n_actions], &mut rng).unwrap();
    let mut target = net.clone();
    let mut opt = AdamW::new(&net, 0.02, 0.9, 0.999, 1e-12, 0.0);
    for round in 0..60 {
        opt.learning_rate = match round {
            0..30 => 0.02,
            30..45 => 2e-3,
            _ => 2e-4,
        };
        for _ in 0..2000 {
            backward_and_update(&mut net, &batch, &target, discount, &mut opt).unwrap();
        }
        sync_target(&net, &mut target);
    }
    let mut worst = 0.0f64;
    for s in 0..n_states - 1 {
        let got = net.forward(one_hot(s, n_states).features()).unwrap();
        for a in 0..n_actions {
            worst = worst.max((got[a] - q[s][a]).abs());
        }
    }
    worst
}

pub fn random_weights(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

pub struct EpisodeReport {
    pub episodes: usize,
    pub steps: usize,
    /// Largest energy increase over one step.
    pub max_ascent: f64,
    /// Largest amount by which a weighted energy fell below the bound.
    pub max_bound_violation: f64,
    pub max_orthonormality_error: f64,
}

/// Random energy-mode episodes on H₂ (0.7 Å) and H₃⁺ (1.7 Å) with both pools.
/// The bound is the weighted sum of the lowest exact levels reachable by the
/// pool: the `S_z = 0` sector when filtered, the whole `N`-electron space
/// otherwise.
pub fn random_energy_episodes(per_case: usize, seed: u64) -> EpisodeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EpisodeReport {
        episodes: 0,
        steps: 0,
        max_ascent: 0.0,
        max_bound_violation: 0.0,
        max_orthonormality_error: 0.0,
    };
    let systems =
        [MolecularSystem::build(Molecule::H2, 0.7).unwrap(), MolecularSystem::build(Molecule::H3Plus, 1.7).unwrap()];
    for sys in &systems {
        for filtered in [true, false] {
            let pool = build_action_pool(sys.n_qubits(), filtered).unwrap();
            let spectrum = sys.hamiltonian.spectrum();
            let levels: Vec<f64> = if filtered {
                spectrum.sector_values(sys.sector).to_vec()
            } else {
                spectrum.number_sector_values(sys.sector.n_electrons)
            };
            for _ in 0..per_case {
                let k = rng.random_range(1..=4);
                let weights = random_weights(k, &mut rng);
                let mut ens = sys.reference_ensemble(&weights, ReferenceOrdering::ExcitationRank).unwrap();
                let bound: f64 = ens.weights().iter().zip(&levels).map(|(w, e)| w * e).sum();
                let config = EnvConfig { max_steps: 8, ..EnvConfig::default() };
                let mut energy = ensemble_energy(&ens, &sys.hamiltonian);
                report.max_bound_violation = report.max_bound_violation.max(bound - energy);
                for _ in 0..config.max_steps {
                    let a = rng.random_range(0..pool.len());
                    let (next, outcome) = step_energy_mode(&ens, &sys.hamiltonian, &pool, a, &config).unwrap();
                    report.max_ascent = report.max_ascent.max(outcome.ensemble_energy - energy);
                    report.max_bound_violation = report.max_bound_violation.max(bound - outcome.ensemble_energy);
                    report.max_orthonormality_error = report.max_orthonormality_error.max(next.orthonormality_error());
                    energy = outcome.ensemble_energy;
                    ens = next;
                    report.steps += 1;
                }
                report.episodes += 1;
            }
        }
    }
    report
}

/// True when the state width equals twice the pool size for every K in 1..=4.
pub fn rl_state_lengths_are_k_independent() -> bool {
    let mut ok = true;
    for (molecule, bond) in [(Molecule::H2, 0.7), (Molecule::H3Plus, 1.7)] {
        let sys = MolecularSystem::build(molecule, bond).unwrap();
        for filtered in [false, true] {
            let pool = build_action_pool(sys.n_qubits(), filtered).unwrap();
            for k in 1..=4 {
                let weights: Vec<f64> = (0..k).map(|i| (k - i) as f64).collect();
                let ens = sys.reference_ensemble(&weights, ReferenceOrdering::ExcitationRank).unwrap();
                let (state, norm) = compute_rl_state(&ens, &sys.hamiltonian, &pool).unwrap();
                ok &= state.len() == 2 * pool.len() && (state.residual_norm() - norm).abs() < 1e-15;
            }
        }
    }
    ok
}

/// Largest `|E_det(occupied) + E_nuc − E_HF|` over a few geometries.
pub fn hf_reassembly_error() -> f64 {
    let geometries = [
        Geometry::h2(0.7).unwrap(),
        Geometry::h2(3.0).unwrap(),
        Geometry::h3_plus(1.0).unwrap(),
        Geometry::h3_plus(1.7).unwrap(),
        Geometry::h3_plus(3.0).unwrap(),
    ];
    let mut worst = 0.0f64;
    for g in &geometries {
        let ints = build_integrals(g, &sto6g_basis(g).unwrap()).unwrap();
        let scf = run_rhf(&ints, g.n_electrons()).unwrap();
        let so = spin_orbital_integrals(&ints, &scf);
        let occupied: Vec<usize> = (0..g.n_electrons()).collect();
        worst = worst.max((so.determinant_energy(&occupied) + ints.e_nuc - scf.e_hf).abs());
    }
    worst
}
