//! End-to-end runs of the `delayconv` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

const SMALL: &str = r#"
modes = 8

[grid]
m = 64
intervals = 2

[run]
seed = 3
paths = 20
lattice_points = 12
calibration_paths = 200
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delayconv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn sha(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_lists_every_flag() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--config", "--out", "--seed", "--workers", "--dump-modes"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
    for cmd in ["fundamental", "mild", "simulate", "moments", "verify"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["simulate", "--frobnicate"])), 2);
    assert_eq!(code(&run(&["integrate"])), 2);
    assert_eq!(code(&run(&["simulate", "--seed", "minus-one"])), 2);
    let negative = config(&dir, "neg.toml", "delay.r = -1.0\n");
    assert_eq!(
        code(&run(&[
            "fundamental",
            "--config",
            s(&negative),
            "--out",
            s(dir.path())
        ])),
        2
    );
    let unknown = config(&dir, "unknown.toml", "[grid]\nsteps = 4\n");
    assert_eq!(code(&run(&["fundamental", "--config", s(&unknown)])), 2);
}

#[test]
fn exploding_mode_exits_three() {
    let dir = TempDir::new().unwrap();
    let stiff = config(
        &dir,
        "stiff.toml",
        "eigenvalues.kind = \"custom-list\"\neigenvalues.values = [1e8]\na2.c = 1e6\na2.nu = 0.9\n[grid]\nm = 4\nintervals = 2\n",
    );
    let out = run(&["fundamental", "--config", s(&stiff), "--out", s(dir.path())]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fundamental_writes_both_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "run.toml", SMALL);
    let out_dir = dir.path().join("out");
    assert_eq!(
        code(&run(&[
            "fundamental",
            "--config",
            s(&cfg),
            "--out",
            s(&out_dir)
        ])),
        0
    );
    let g = csv_rows(&out_dir.join("fundamental.csv"));
    assert_eq!(g.len(), 8 * 129);
    assert_eq!(g[0], ["1", "1.0", "0.0", "1.0"]);
    let fits = std::fs::read_to_string(out_dir.join("fits.csv")).unwrap();
    assert!(fits.starts_with(
        "estimate_name,n,gamma,beta,constant,argmax_s,argmax_t,refine_ratio,diverged"
    ));
    assert!(fits.lines().count() > 10);
}

#[test]
fn mild_without_history_reproduces_fundamental_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "run.toml", SMALL);
    let out_dir = dir.path().join("out");
    assert_eq!(
        code(&run(&[
            "fundamental",
            "--config",
            s(&cfg),
            "--out",
            s(&out_dir)
        ])),
        0
    );
    let datum = config(
        &dir,
        "datum.toml",
        "phi0 = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]\n",
    );
    assert_eq!(
        code(&run(&[
            "mild",
            "--datum",
            s(&datum),
            "--config",
            s(&cfg),
            "--out",
            s(&out_dir),
            "--dump-modes"
        ])),
        0
    );
    let g = csv_rows(&out_dir.join("fundamental.csv"));
    let traj = csv_rows(&out_dir.join("trajectory.csv"));
    assert_eq!(traj.len(), 129);
    for (i, row) in traj.iter().enumerate() {
        assert_eq!(row.len(), 3 + 8);
        for k in 0..8 {
            assert_eq!(row[3 + k], g[k * 129 + i][3], "mode {k} node {i}");
        }
    }
}

#[test]
fn zero_datum_gives_zero_trajectory() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "run.toml", SMALL);
    let datum = config(&dir, "zero.toml", "");
    assert_eq!(
        code(&run(&[
            "mild",
            "--datum",
            s(&datum),
            "--config",
            s(&cfg),
            "--out",
            s(dir.path())
        ])),
        0
    );
    for row in csv_rows(&dir.path().join("trajectory.csv")) {
        assert_eq!(row[1], "0.0");
        assert_eq!(row[2], "0.0");
    }
}

#[test]
fn simulate_is_reproducible_and_independent_of_workers() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "run.toml", SMALL);
    let mut hashes = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "8"), ("c", "1")] {
        let out = dir.path().join(name);
        assert_eq!(
            code(&run(&[
                "simulate",
                "--config",
                s(&cfg),
                "--out",
                s(&out),
                "--workers",
                workers
            ])),
            0
        );
        hashes.push(sha(&out.join("paths.csv")));
    }
    assert_eq!(hashes[0], hashes[1]);
    assert_eq!(hashes[0], hashes[2]);

    let other = dir.path().join("d");
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            s(&cfg),
            "--out",
            s(&other),
            "--seed",
            "4"
        ])),
        0
    );
    assert_ne!(sha(&other.join("paths.csv")), hashes[0]);
    assert_eq!(csv_rows(&other.join("paths.csv")).len(), 20 * 129);
}

#[test]
fn silent_noise_gives_zero_paths() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "run.toml",
        &format!("{SMALL}\n[noise]\nb = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]\n"),
    );
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            s(&cfg),
            "--out",
            s(dir.path())
        ])),
        0
    );
    for row in csv_rows(&dir.path().join("paths.csv")) {
        assert_eq!((row[2].as_str(), row[3].as_str()), ("0.0", "0.0"));
    }
}

#[test]
fn moments_table_has_zero_diagonal_and_both_estimates() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "run.toml", SMALL);
    assert_eq!(
        code(&run(&[
            "moments",
            "--config",
            s(&cfg),
            "--out",
            s(dir.path())
        ])),
        0
    );
    let text = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(text.starts_with("s,t,gamma,quadrature_value,mc_mean,mc_stderr,paths\n"));
    let rows = csv_rows(&dir.path().join("moments.csv"));
    assert!(rows.len() > 8);
    for row in &rows {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        if v[0] == v[1] {
            assert_eq!((v[3], v[4]), (0.0, 0.0));
        } else {
            assert!(v[3] > 0.0 && v[4] > 0.0 && v[5] > 0.0);
        }
        assert_eq!(v[6], 20.0);
    }
}

#[test]
fn verify_passes_on_semigroup_model_and_fails_when_constants_are_scaled() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "semigroup.toml",
        &format!("a1.c = 0.0\na2.c = 0.0\nkernel.form = \"zero\"\nkernel.params = []\n{SMALL}moment_gammas = []\n"),
    );
    let out = run(&["verify", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.starts_with("PASS"));
    assert!(csv_rows(&dir.path().join("report.csv")).len() > 10);

    let out = run(&[
        "verify",
        "--config",
        s(&cfg),
        "--out",
        s(dir.path()),
        "--constant-scale",
        "100",
    ]);
    assert_eq!(code(&out), 1);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.starts_with("FAIL"));
}

#[test]
fn default_heat_model_verifies() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.contains("moment_exponent") && report.contains("path_holder"));
}
