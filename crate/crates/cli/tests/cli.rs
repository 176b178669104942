use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rlcqe(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlcqe"))
        .args(args)
        .env("RLCQE_OUTPUT_DIR", out)
        .env_remove("RLCQE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fci_values(molecule: &str, bond: &str) -> Vec<f64> {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(&["fci", "--molecule", molecule, "--bond", bond], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("index,energy_hartree"));
    lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn fci_prints_ascending_sector_values() {
    let h2 = fci_values("h2", "0.7");
    assert_eq!(h2.len(), 4);
    assert!((h2[0] - -1.144979079498).abs() < 1e-8);
    let h3 = fci_values("h3p", "1.7");
    assert_eq!(h3.len(), 9);
    for v in [&h2, &h3] {
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn malformed_weights_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(
        &["scan", "--molecule", "h2", "--rmin", "0.7", "--rmax", "0.7", "--points", "1", "--weights", "1,-2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--weights"), "{}", stderr(&o));
    assert!(!dir.path().join("scan_h2.csv").exists());
}

#[test]
fn mismatched_k_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(
        &["scan", "--molecule", "h2", "--rmin", "0.7", "--rmax", "0.7", "--k", "3", "--weights", "9,9,1,1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k"));
}

#[test]
fn single_point_scan_writes_csv_operators_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "scan",
        "--molecule",
        "h2",
        "--rmin",
        "0.7",
        "--rmax",
        "0.7",
        "--points",
        "1",
        "--k",
        "4",
        "--weights",
        "9,9,1,1",
        "--max-steps",
        "5",
        "--policy",
        "greedy",
        "--seed",
        "7",
    ];
    let o = rlcqe(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("scan_h2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("bond_angstrom,state_index,energy_hartree,energy_exact_hartree,abs_error,n_operators")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(row[0], "0.7");
        assert!(row[4].parse::<f64>().unwrap() <= 1e-3);
    }
    let ops: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scan_h2_operators.json")).unwrap()).unwrap();
    let ops = ops[0]["operators"].as_array().unwrap();
    assert_eq!(ops.len().to_string(), rows[0][5]);
    for op in ops {
        for key in ["p", "q", "k", "l", "theta"] {
            assert!(op.get(key).is_some());
        }
    }
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scan_h2.run.json")).unwrap()).unwrap();
    assert_eq!(sidecar["command"], "scan");
    assert_eq!(sidecar["seed"], 7);
    assert!(sidecar["version"].is_string());
    assert!(sidecar["config"]["settings"]["step_budget"] == 5);
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// Sidecar JSON with the output directory, which differs between runs, removed.
fn sidecar_without_output(dir: &Path, name: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&read(dir, name)).unwrap();
    let out = v["config"]["args"]["out"].take();
    assert_eq!(out["output"].as_str().map(Path::new), Some(dir));
    v
}

#[test]
fn identical_runs_produce_identical_files() {
    let args = ["scan", "--molecule", "h2", "--rmin", "0.5", "--rmax", "2.0", "--points", "3", "--jobs", "2"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(rlcqe(&args, a.path()).status.code(), Some(0));
    assert_eq!(rlcqe(&args, b.path()).status.code(), Some(0));
    for name in ["scan_h2.csv", "scan_h2_operators.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert_eq!(
        sidecar_without_output(a.path(), "scan_h2.run.json"),
        sidecar_without_output(b.path(), "scan_h2.run.json")
    );
    let evolve = ["evolve", "--molecule", "h2", "--bond", "0.7", "--tmax", "0.5", "--max-steps", "5", "--seed", "3"];
    assert_eq!(rlcqe(&evolve, a.path()).status.code(), Some(0));
    assert_eq!(rlcqe(&evolve, b.path()).status.code(), Some(0));
    assert_eq!(read(a.path(), "evolve_h2.csv"), read(b.path(), "evolve_h2.csv"));
    assert_eq!(
        sidecar_without_output(a.path(), "evolve_h2.run.json"),
        sidecar_without_output(b.path(), "evolve_h2.run.json")
    );
}

#[test]
fn zero_duration_evolution_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(&["evolve", "--molecule", "h2", "--bond", "0.7", "--tmax", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("evolve_h2.csv")).unwrap();
    assert_eq!(csv, "t,step_count,final_fidelity,energy_expectation\n");
    assert!(dir.path().join("evolve_h2.run.json").exists());
}

#[test]
fn h2_evolution_meets_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--molecule",
        "h2",
        "--bond",
        "0.7",
        "--tmax",
        "20",
        "--dt",
        "0.05",
        "--max-steps",
        "5",
        "--policy",
        "greedy",
        "--seed",
        "3",
    ];
    let o = rlcqe(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("evolve_h2.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r[1] <= 5.0 && r[2] >= 0.999));
}

#[test]
fn too_small_budget_fails_evolution() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["evolve", "--molecule", "h3p", "--bond", "1.7", "--tmax", "0.5", "--max-steps", "1"];
    let o = rlcqe(&args, dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("time steps stayed below"));
}

#[test]
fn evolve_rejects_the_dqn_policy() {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(&["evolve", "--molecule", "h2", "--bond", "0.7", "--policy", "dqn"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--policy"));
}

#[test]
fn tolerance_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["scan", "--molecule", "h2", "--rmin", "0.7", "--rmax", "0.7", "--weights", "1,1,1,1", "--tolerance", "1e-3"];
    let o = rlcqe(&args, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("0.7"));
    assert!(dir.path().join("scan_h2.csv").exists());
}

#[test]
fn integrals_dump_is_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = rlcqe(&["integrals", "--molecule", "h2", "--bond", "0.7", "--hamiltonian"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n_spatial"], 2);
    assert_eq!(v["S"].as_array().unwrap().len(), 4);
    assert_eq!(v["eri"].as_array().unwrap().len(), 16);
    assert_eq!(v["hamiltonian_real"].as_array().unwrap().len(), 256);
    assert!((v["e_nuc"].as_f64().unwrap() - 0.755967444171429).abs() < 1e-9);
}
