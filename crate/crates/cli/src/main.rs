//! Command-line front end: geometry scans, time evolution, exact spectra and
//! integral dumps.
//!
//! Exit codes: 0 success, 1 tolerance or runtime failure, 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rlcqe::agent::TrainConfig;
use rlcqe::solvers::{
    bond_grid, evolution_csv, evolve, initial_superposition, operator_records, scan, scan_csv, EvolutionConfig,
    MolecularSystem, Molecule, OperatorRecord, ReferenceOrdering, ScanPolicy, SolverSettings, TrainingOptions,
};

#[derive(Parser, Debug)]
#[command(name = "rlcqe", version, about = "Reinforcement-learning contracted quantum eigensolver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Excited-state energies over a bond-length grid.
    Scan(ScanArgs),
    /// Constant-depth real-time evolution from a random superposition.
    Evolve(EvolveArgs),
    /// Exact eigenvalues of the two-electron, S_z = 0 sector.
    Fci(PointArgs),
    /// AO integrals (and optionally the qubit Hamiltonian) as JSON.
    Integrals(IntegralArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum PolicyArg {
    Greedy,
    Dqn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OrderingArg {
    ExcitationRank,
    DiagonalEnergy,
}

impl From<OrderingArg> for ReferenceOrdering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::ExcitationRank => ReferenceOrdering::ExcitationRank,
            OrderingArg::DiagonalEnergy => ReferenceOrdering::DiagonalEnergy,
        }
    }
}

fn parse_molecule(s: &str) -> Result<Molecule, String> {
    s.parse().map_err(|e: rlcqe::solvers::SolverError| e.to_string())
}

/// Unnormalized ensemble weights as given on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
struct Weights(Vec<f64>);

fn parse_weights(s: &str) -> Result<Weights, String> {
    let w = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if w.is_empty() || w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err("weights must be positive finite numbers".into());
    }
    Ok(Weights(w))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(format!("'{s}' is not a non-negative number")),
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct OutputArgs {
    /// Directory for CSV, JSON and sidecar files.
    #[arg(long, env = "RLCQE_OUTPUT_DIR", default_value = ".")]
    output: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ScanArgs {
    #[arg(long, value_parser = parse_molecule)]
    molecule: Molecule,
    #[arg(long, value_parser = parse_positive)]
    rmin: f64,
    #[arg(long, value_parser = parse_positive)]
    rmax: f64,
    #[arg(long, default_value_t = 1)]
    points: usize,
    /// Number of states; defaults to the number of weights.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated unnormalized ensemble weights, non-increasing.
    #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
    weights: Option<Weights>,
    #[arg(long, default_value_t = 5)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Greedy)]
    policy: PolicyArg,
    /// Lookahead beam width of the greedy policy; 1 is one-step greedy.
    #[arg(long, default_value_t = 1024)]
    beam_width: usize,
    #[arg(long, default_value_t = 3000)]
    episodes: usize,
    #[arg(long, default_value_t = 0.5, value_parser = parse_non_negative)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict the operator pool to S_z-conserving actions.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    sz_filter: bool,
    #[arg(long, value_enum, default_value_t = OrderingArg::ExcitationRank)]
    ordering: OrderingArg,
    /// Diagonalize H in the span of the final states before reporting.
    #[arg(long)]
    subspace: bool,
    /// Energy tolerance in Hartree for the exit code.
    #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
    tolerance: f64,
    /// Geometries solved in parallel.
    #[arg(long, env = "RLCQE_THREADS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EvolveArgs {
    #[arg(long, value_parser = parse_molecule)]
    molecule: Molecule,
    #[arg(long, value_parser = parse_positive)]
    bond: f64,
    #[arg(long, default_value_t = 20.0, value_parser = parse_non_negative)]
    tmax: f64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_positive)]
    dt: f64,
    /// Operator budget per time step.
    #[arg(long, default_value_t = 20)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Greedy)]
    policy: PolicyArg,
    /// Seed of the random initial superposition.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference determinants in the initial superposition.
    #[arg(long, default_value_t = 4)]
    superposed: usize,
    #[arg(long, default_value_t = 1.0 - 1e-6, value_parser = parse_positive)]
    fidelity_threshold: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    sz_filter: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PointArgs {
    #[arg(long, value_parser = parse_molecule)]
    molecule: Molecule,
    #[arg(long, value_parser = parse_positive)]
    bond: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct IntegralArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Also dump the dense qubit Hamiltonian (real and imaginary parts).
    #[arg(long)]
    hamiltonian: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    file: Option<PathBuf>,
}

/// Usage problems found after parsing; reported with exit code 2.
struct UsageError(String);

enum Outcome {
    Success,
    Failure,
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: C,
}

fn write_sidecar<C: Serialize>(path: &Path, command: &str, seed: u64, config: C) -> Result<()> {
    let sidecar = Sidecar { command, version: env!("CARGO_PKG_VERSION"), seed, config };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Serialize)]
struct ResolvedScan<'a> {
    args: &'a ScanArgs,
    weights: &'a [f64],
    grid: &'a [f64],
    settings: &'a SolverSettings,
    policy: &'a ScanPolicy,
}

#[derive(Serialize)]
struct OperatorDump {
    bond_angstrom: f64,
    operators: Vec<OperatorRecord>,
}

fn cmd_scan(args: &ScanArgs) -> Result<Result<Outcome, UsageError>> {
    let weights = match (&args.weights, args.k) {
        (Some(Weights(w)), Some(k)) if w.len() != k => {
            return Ok(Err(UsageError(format!("--k {k} does not match the {} values given to --weights", w.len()))))
        }
        (Some(Weights(w)), _) => w.clone(),
        (None, Some(k)) if k > 0 => (1..=k).rev().map(|x| x as f64).collect(),
        (None, _) => vec![9.0, 9.0, 1.0, 1.0],
    };
    if weights.windows(2).any(|p| p[1] > p[0]) {
        return Ok(Err(UsageError("--weights must be non-increasing".into())));
    }
    if args.rmin > args.rmax || args.points == 0 {
        return Ok(Err(UsageError("need --rmin ≤ --rmax and --points ≥ 1".into())));
    }
    if args.max_steps == 0 || args.beam_width == 0 || args.jobs == 0 {
        return Ok(Err(UsageError("--max-steps, --beam-width and --jobs must be positive".into())));
    }
    let grid = bond_grid(args.rmin, args.rmax, args.points)?;
    let settings = SolverSettings {
        step_budget: args.max_steps,
        lambda: args.lambda,
        sz_filter: args.sz_filter,
        ordering: args.ordering.into(),
        subspace: args.subspace,
        ..SolverSettings::default()
    };
    let policy = match args.policy {
        PolicyArg::Greedy => ScanPolicy::Lookahead { width: args.beam_width },
        PolicyArg::Dqn => ScanPolicy::Dqn {
            config: TrainConfig {
                episodes: args.episodes,
                lambda: args.lambda,
                seed: args.seed,
                ..TrainConfig::default()
            },
            options: TrainingOptions::default(),
        },
    };
    if let ScanPolicy::Dqn { config, .. } = &policy {
        if let Err(e) = config.validate() {
            return Ok(Err(UsageError(e.to_string())));
        }
    }
    ensure_dir(&args.out.output)?;
    let stem = format!("scan_{}", args.molecule);
    let resolved = ResolvedScan { args, weights: &weights, grid: &grid, settings: &settings, policy: &policy };
    write_sidecar(&args.out.output.join(format!("{stem}.run.json")), "scan", args.seed, &resolved)?;

    let points = scan(args.molecule, &grid, &weights, &settings, &policy, args.jobs)?;
    let csv_path = args.out.output.join(format!("{stem}.csv"));
    fs::write(&csv_path, scan_csv(&points)).with_context(|| format!("writing {}", csv_path.display()))?;
    let dumps: Vec<OperatorDump> = points
        .iter()
        .filter_map(|p| {
            p.result
                .as_ref()
                .ok()
                .map(|r| OperatorDump { bond_angstrom: p.bond_angstrom, operators: operator_records(r) })
        })
        .collect();
    let ops_path = args.out.output.join(format!("{stem}_operators.json"));
    fs::write(&ops_path, serde_json::to_string_pretty(&dumps)? + "\n")
        .with_context(|| format!("writing {}", ops_path.display()))?;

    let mut failed = 0;
    for p in &points {
        match &p.result {
            Ok(r) if r.max_abs_error <= args.tolerance => {}
            Ok(r) => {
                failed += 1;
                eprintln!(
                    "bond {} Å: max |E - E_exact| = {:.3e} Ha exceeds {:.1e} ({} operators)",
                    p.bond_angstrom,
                    r.max_abs_error,
                    args.tolerance,
                    r.n_operators()
                );
            }
            Err(e) => {
                failed += 1;
                eprintln!("bond {} Å: {e}", p.bond_angstrom);
            }
        }
    }
    println!("wrote {} ({} geometries, {failed} outside tolerance)", csv_path.display(), points.len());
    Ok(Ok(if failed == 0 { Outcome::Success } else { Outcome::Failure }))
}

fn cmd_evolve(args: &EvolveArgs) -> Result<Result<Outcome, UsageError>> {
    if args.policy == PolicyArg::Dqn {
        return Ok(Err(UsageError("--policy dqn is not supported by evolve; use greedy".into())));
    }
    if args.fidelity_threshold > 1.0 || args.superposed == 0 {
        return Ok(Err(UsageError("need --fidelity-threshold ≤ 1 and --superposed ≥ 1".into())));
    }
    let config = EvolutionConfig {
        t_max: args.tmax,
        dt: args.dt,
        step_budget: args.max_steps,
        fidelity_threshold: args.fidelity_threshold,
        n_superposed: args.superposed,
        seed: args.seed,
        sz_filter: args.sz_filter,
        ..EvolutionConfig::default()
    };
    ensure_dir(&args.out.output)?;
    let stem = format!("evolve_{}", args.molecule);
    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a EvolveArgs,
        evolution: &'a EvolutionConfig,
    }
    write_sidecar(
        &args.out.output.join(format!("{stem}.run.json")),
        "evolve",
        args.seed,
        Resolved { args, evolution: &config },
    )?;
    let system = MolecularSystem::build(args.molecule, args.bond)?;
    let initial = initial_superposition(&system, config.n_superposed, config.seed)?;
    let result = evolve(&system, &initial, &config)?;
    let csv_path = args.out.output.join(format!("{stem}.csv"));
    fs::write(&csv_path, evolution_csv(&result)).with_context(|| format!("writing {}", csv_path.display()))?;
    let failures = result.failures();
    println!(
        "wrote {} ({} steps, max M = {}, min fidelity = {:.9}, {failures} failed)",
        csv_path.display(),
        result.steps.len(),
        result.max_step_count(),
        result.min_fidelity()
    );
    if failures > 0 {
        eprintln!("{failures} time steps stayed below fidelity {}", config.fidelity_threshold);
    }
    Ok(Ok(if failures == 0 { Outcome::Success } else { Outcome::Failure }))
}

fn cmd_fci(args: &PointArgs) -> Result<Outcome> {
    let system = MolecularSystem::build(args.molecule, args.bond)?;
    let values = system.hamiltonian.spectrum().sector_values(system.sector);
    println!("# {} at {} Å, N = {}, S_z = 0", args.molecule, args.bond, system.sector.n_electrons);
    println!("index,energy_hartree");
    for (i, v) in values.iter().enumerate() {
        println!("{i},{v:?}");
    }
    Ok(Outcome::Success)
}

fn json_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_array(xs: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = xs.into_iter().map(json_number).collect();
    format!("[{}]", items.join(", "))
}

fn cmd_integrals(args: &IntegralArgs) -> Result<Outcome> {
    let system = MolecularSystem::build(args.point.molecule, args.point.bond)?;
    let ints = &system.integrals;
    let mut out = String::from("{\n");
    writeln!(out, "  \"n_spatial\": {},", ints.n_spatial)?;
    writeln!(out, "  \"S\": {},", json_array(ints.overlap.transpose().as_slice().iter().copied()))?;
    writeln!(out, "  \"T\": {},", json_array(ints.kinetic.transpose().as_slice().iter().copied()))?;
    writeln!(out, "  \"V\": {},", json_array(ints.potential.transpose().as_slice().iter().copied()))?;
    writeln!(out, "  \"eri\": {},", json_array(ints.eri.as_slice().iter().copied()))?;
    if args.hamiltonian {
        let h = system.hamiltonian.matrix();
        let dim = system.hamiltonian.dim();
        let entries: Vec<_> = (0..dim).flat_map(|i| (0..dim).map(move |j| h[(i, j)])).collect();
        writeln!(out, "  \"n_qubits\": {},", system.n_qubits())?;
        writeln!(out, "  \"hamiltonian_real\": {},", json_array(entries.iter().map(|c| c.re)))?;
        writeln!(out, "  \"hamiltonian_imag\": {},", json_array(entries.iter().map(|c| c.im)))?;
    }
    writeln!(out, "  \"e_nuc\": {}", json_number(ints.e_nuc))?;
    out.push_str("}\n");
    match &args.file {
        Some(path) => fs::write(path, out).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(Outcome::Success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Fci(a) => cmd_fci(a).map(Ok),
        Command::Integrals(a) => cmd_integrals(a).map(Ok),
    };
    match result {
        Ok(Ok(Outcome::Success)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Failure)) => ExitCode::from(1),
        Ok(Err(UsageError(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
