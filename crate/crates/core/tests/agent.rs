use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rlcqe::agent::{
    backward_and_update, select_action, train_episode, AdamW, Checkpoint, DqnAgent, QNetwork, TrainConfig, Transition,
};
use rlcqe::environment::{EnergyEnvironment, RLState};
use rlcqe::solvers::{MolecularSystem, Molecule, SolverSettings};

mod common;

fn params(net: &QNetwork) -> Vec<f64> {
    net.layers().iter().flat_map(|l| l.weight.iter().chain(&l.bias).copied()).collect()
}

#[test]
fn backward_matches_central_differences() {
    let worst = common::gradient_check(3);
    assert!(worst <= 1e-6, "relative gradient error {worst:e}");
}

/// A linear network on one-hot states is a Q table; repeated Bellman
/// regression with target syncs must reach the value-iteration fixed point.
#[test]
fn tabular_bellman_regression_reaches_value_iteration() {
    let err = common::tabular_bellman_error();
    assert!(err < 1e-8, "max |Q − Q*| = {err:e}");
}

#[test]
fn full_exploration_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 6;
    let net = QNetwork::new(&[4, n], &mut rng).unwrap();
    let state = RLState::new(vec![0.3, -0.1, 0.7, 0.2]);
    let draws = 60_000;
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        counts[select_action(&net, &state, 1.0, &mut rng).unwrap()] += 1;
    }
    let expected = draws as f64 / n as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 0.1% critical value for 5 degrees of freedom
    assert!(chi2 < 20.515, "chi-square {chi2}, counts {counts:?}");
}

#[test]
fn greedy_selection_ignores_randomness() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net = QNetwork::new(&[3, 5], &mut rng).unwrap();
    let state = RLState::new(vec![1.0, 0.5, -0.5]);
    let first = select_action(&net, &state, 0.0, &mut rng).unwrap();
    for _ in 0..100 {
        assert_eq!(select_action(&net, &state, 0.0, &mut rng).unwrap(), first);
    }
}

fn small_config() -> TrainConfig {
    TrainConfig { hidden_width: 16, n_layers: 3, batch_size: 4, ..TrainConfig::default() }
}

fn random_batch(width: usize, n_actions: usize, rows: usize, rng: &mut impl Rng) -> Vec<Transition> {
    (0..rows)
        .map(|i| Transition {
            state: RLState::new((0..width).map(|_| rng.random_range(-1.0..1.0)).collect()),
            action_index: rng.random_range(0..n_actions),
            reward: rng.random_range(-1.0..0.0),
            next_state: RLState::new((0..width).map(|_| rng.random_range(-1.0..1.0)).collect()),
            terminal: i % 3 == 0,
        })
        .collect()
}

#[test]
fn checkpoint_resume_reproduces_the_next_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let config = small_config();
    let mut agent = DqnAgent::new(6, 5, config.clone()).unwrap();
    for _ in 0..12 {
        let b = random_batch(6, 5, 4, &mut rng);
        let refs: Vec<&Transition> = b.iter().collect();
        backward_and_update(&mut agent.online, &refs, &agent.target, 0.99, &mut agent.optimizer).unwrap();
        agent.train_steps += 1;
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("agent.ckpt");
    Checkpoint {
        online: agent.online.clone(),
        target: agent.target.clone(),
        optimizer: agent.optimizer.clone(),
        train_steps: agent.train_steps,
    }
    .save(&path)
    .unwrap();
    let loaded = Checkpoint::load(&path, Some(5)).unwrap();
    assert_eq!(loaded.online, agent.online);
    assert_eq!(loaded.target, agent.target);
    assert_eq!(loaded.optimizer, agent.optimizer);
    assert_eq!(loaded.train_steps, 12);
    assert!(Checkpoint::load(&path, Some(6)).is_err());
    let mut resumed = DqnAgent::restore(loaded.online, loaded.target, loaded.optimizer, loaded.train_steps, config);

    let b = random_batch(6, 5, 4, &mut rng);
    let refs: Vec<&Transition> = b.iter().collect();
    let l1 = backward_and_update(&mut agent.online, &refs, &agent.target, 0.99, &mut agent.optimizer).unwrap();
    let l2 = backward_and_update(&mut resumed.online, &refs, &resumed.target, 0.99, &mut resumed.optimizer).unwrap();
    assert_eq!(l1, l2);
    assert_eq!(params(&agent.online), params(&resumed.online));
    assert_eq!(agent.optimizer, resumed.optimizer);
}

#[test]
fn zero_error_batch_only_applies_weight_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut net = QNetwork::with_shape(4, 8, 2, 3, &mut rng).unwrap();
    let target = net.clone();
    // terminal rows whose reward equals the current prediction
    let batch_owned: Vec<Transition> = (0..5)
        .map(|i| {
            let state = RLState::new((0..4).map(|_| rng.random_range(-1.0..1.0)).collect());
            let q = net.forward(state.features()).unwrap();
            Transition { action_index: i % 3, reward: q[i % 3], next_state: state.clone(), state, terminal: true }
        })
        .collect();
    let batch: Vec<&Transition> = batch_owned.iter().collect();
    let (lr, wd) = (0.01, 0.1);
    let mut opt = AdamW::new(&net, lr, 0.9, 0.999, 1e-8, wd);
    let before = params(&net);
    let loss = backward_and_update(&mut net, &batch, &target, 0.9, &mut opt).unwrap();
    assert_eq!(loss, 0.0);
    for (a, b) in params(&net).iter().zip(&before) {
        assert!((a - b * (1.0 - lr * wd)).abs() <= 1e-15 * b.abs().max(1.0));
    }
}

#[test]
fn terminal_rows_ignore_next_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net0 = QNetwork::with_shape(3, 8, 2, 4, &mut rng).unwrap();
    let target = net0.clone();
    let base = random_batch(3, 4, 6, &mut rng);
    let mut scrambled = base.clone();
    for t in scrambled.iter_mut().filter(|t| t.terminal) {
        t.next_state = RLState::new(vec![1e6, -1e6, 3e5]);
    }
    let run = |batch: &[Transition]| {
        let mut net = net0.clone();
        let mut opt = AdamW::new(&net, 1e-3, 0.9, 0.999, 1e-8, 0.01);
        let refs: Vec<&Transition> = batch.iter().collect();
        let loss = backward_and_update(&mut net, &refs, &target, 0.99, &mut opt).unwrap();
        (loss, params(&net))
    };
    assert_eq!(run(&base), run(&scrambled));
}

#[test]
fn agent_trains_once_replay_holds_a_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = TrainConfig { target_sync_period: 2, ..small_config() };
    let mut agent = DqnAgent::new(3, 4, config).unwrap();
    let batch = random_batch(3, 4, 8, &mut rng);
    let mut losses = Vec::new();
    for t in batch {
        losses.push(agent.observe(t).unwrap());
    }
    assert!(losses[..3].iter().all(Option::is_none));
    assert!(losses[3..].iter().all(Option::is_some));
    assert_eq!(agent.train_steps, 5);
    // synced after step 4, then one more update
    assert_ne!(agent.online, agent.target);
    assert!(agent.online.all_finite());
}

/// Converged transitions carry the absorbing return `R / (1 − η)`; budget
/// exhaustion is terminal with the plain reward.
#[test]
fn converged_steps_store_the_absorbing_return() {
    let sys = MolecularSystem::build(Molecule::H2, 0.7).unwrap();
    let settings = SolverSettings::default();
    let pool = settings.pool(&sys).unwrap();
    let initial = sys.reference_ensemble(&[9.0, 9.0, 1.0, 1.0], settings.ordering).unwrap();
    let mut env = EnergyEnvironment::new(&sys.hamiltonian, &pool, initial, settings.env_config(0.5)).unwrap();
    let config = TrainConfig { batch_size: 10_000, ..small_config() };
    let discount = config.discount;
    let mut agent = DqnAgent::new(2 * pool.len(), pool.len(), config).unwrap();
    let (mut converged, mut timed_out) = (0, 0);
    for _ in 0..200 {
        let before = agent.replay.len();
        let last_reward = train_episode(&mut agent, &mut env, 1.0).unwrap();
        let stored: Vec<Transition> = (before..agent.replay.len()).map(|i| agent.replay.get(i)).collect();
        assert!(!stored.is_empty() && stored.len() <= settings.step_budget);
        assert!(stored[..stored.len() - 1].iter().all(|t| !t.terminal));
        let last = stored.last().unwrap();
        if last.next_state.residual_norm() < settings.residual_tolerance {
            assert!(last.terminal);
            assert!((last.reward * (1.0 - discount) - last_reward).abs() < 1e-12);
            converged += 1;
        } else {
            assert_eq!(stored.len(), settings.step_budget);
            assert!(last.terminal);
            assert_eq!(last.reward, last_reward);
            timed_out += 1;
        }
    }
    assert!(converged > 0 && timed_out > 0, "{converged} converged, {timed_out} timed out");
}
