//! End-to-end command-line tests: exit codes, help surface, determinism,
//! and the restoration pipeline.

use quatkrylov_core::imaging::{stock_image, StockImage};
use quatkrylov_core::instances::toeplitz_dominant;
use quatkrylov_core::io::{read_runlog, write_extended};
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quatkrylov"))
}

fn write_identity_system(dir: &Path) -> PathBuf {
    let a = quatkrylov_core::QMatrix::sparse_identity(6);
    let path = dir.join("identity.qmm");
    write_extended(&a, &path).unwrap();
    path
}

#[test]
fn identity_system_converges_in_one_iteration_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_identity_system(dir.path());
    let log = dir.path().join("run.json");
    let out = bin()
        .args(["solve", "--matrix"])
        .arg(&matrix)
        .args(["--log"])
        .arg(&log)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runlog = read_runlog(&log).unwrap();
    assert_eq!(runlog.iterations, 1);
    assert_eq!(runlog.termination, "converged");
}

#[test]
fn missing_file_exits_three() {
    let out = bin()
        .args(["solve", "--matrix", "/nonexistent/matrix.qmm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unconverged_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // A dominant system starved of iterations cannot converge.
    let a = toeplitz_dominant(40, 0.1, 1.5, 7);
    let path = dir.path().join("dominant.qmm");
    write_extended(&a, &path).unwrap();
    let out = bin()
        .args(["solve", "--matrix"])
        .arg(&path)
        .args(["--max-iter", "2", "--tol", "1e-12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sgs_preconditioning_meets_the_table_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let a = toeplitz_dominant(120, 0.1, 1.5, 3);
    let path = dir.path().join("dominant.qmm");
    write_extended(&a, &path).unwrap();
    let log = dir.path().join("run.json");
    let out = bin()
        .args(["solve", "--matrix"])
        .arg(&path)
        .args(["--solver", "qgmres-lp", "--precond", "sgs", "--log"])
        .arg(&log)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runlog = read_runlog(&log).unwrap();
    assert!(runlog.iterations <= 5, "took {}", runlog.iterations);
}

#[test]
fn help_enumerates_every_flag() {
    for (cmd, golden) in [
        ("solve", include_str!("golden/solve_flags.txt")),
        (
            "filter-signal",
            include_str!("golden/filter_signal_flags.txt"),
        ),
        (
            "restore-image",
            include_str!("golden/restore_image_flags.txt"),
        ),
        ("bench", include_str!("golden/bench_flags.txt")),
        ("reproduce", include_str!("golden/reproduce_flags.txt")),
    ] {
        let out = bin().args([cmd, "--help"]).output().unwrap();
        assert!(out.status.success());
        let help = String::from_utf8_lossy(&out.stdout).to_string();
        for flag in golden.lines().filter(|l| !l.trim().is_empty()) {
            assert!(
                help.contains(flag),
                "`{cmd} --help` does not mention {flag}"
            );
        }
        // And the help surface introduces no flags beyond the golden list.
        for line in help.lines() {
            if let Some(tok) = line.trim().strip_prefix("--") {
                let name = format!("--{}", tok.split_whitespace().next().unwrap_or(""));
                if name == "--help" || name == "--version" {
                    continue;
                }
                assert!(
                    golden.lines().any(|g| g == name),
                    "`{cmd}` grew an untracked flag {name}; update the golden file"
                );
            }
        }
    }
}

#[test]
fn near_identity_restoration_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    stock_image(StockImage::Blocks, 24)
        .write_png(&input)
        .unwrap();
    let out_png = dir.path().join("out.png");
    let log = dir.path().join("run.json");
    let out = bin()
        .args(["restore-image", "--input"])
        .arg(&input)
        .args(["--blur-size", "1", "--blur-sigma", "1", "--noise", "0"])
        .args(["--lambda", "1e-8", "--out"])
        .arg(&out_png)
        .args(["--log"])
        .arg(&log)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runlog = read_runlog(&log).unwrap();
    let metrics = runlog.metrics.expect("metrics block");
    assert!(metrics.psnr > 60.0, "psnr {}", metrics.psnr);
}

#[test]
fn restoration_is_deterministic_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    stock_image(StockImage::Blobs, 32)
        .write_png(&input)
        .unwrap();
    let mut logs = Vec::new();
    for run in 0..2 {
        let out_png = dir.path().join(format!("out{run}.png"));
        let log = dir.path().join(format!("run{run}.json"));
        let out = bin()
            .args(["restore-image", "--input"])
            .arg(&input)
            .args(["--seed", "9", "--max-iter", "20", "--out"])
            .arg(&out_png)
            .args(["--log"])
            .arg(&log)
            .output()
            .unwrap();
        // A noisy restoration normally stops at max-iter (exit 2): the data
        // residual cannot reach the tolerance below the noise floor.
        assert!(
            matches!(out.status.code(), Some(0) | Some(2)),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        logs.push(read_runlog(&log).unwrap());
    }
    assert_eq!(logs[0].residual_history, logs[1].residual_history);
    assert_eq!(logs[0].iterations, logs[1].iterations);
    // Different seed changes the noise and thus the history.
    let log = dir.path().join("run-other.json");
    let out_png = dir.path().join("out-other.png");
    let out = bin()
        .args(["restore-image", "--input"])
        .arg(&input)
        .args(["--seed", "10", "--max-iter", "20", "--out"])
        .arg(&out_png)
        .args(["--log"])
        .arg(&log)
        .output()
        .unwrap();
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    let other = read_runlog(&log).unwrap();
    assert_ne!(logs[0].residual_history, other.residual_history);
}

#[test]
fn filter_signal_runs_synthetic_and_reports_fit() {
    let out = bin()
        .args(["filter-signal", "--length", "60", "--solver", "qtv-fqgmres"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("filter fit"));
}

#[test]
fn bench_single_seed_is_reproducible() {
    let run = || {
        let out = bin()
            .args([
                "bench",
                "--suite",
                "signal-table",
                "--n",
                "60",
                "--seeds",
                "1",
                "--format",
                "csv",
            ])
            .env("QUATKRYLOV_THREADS", "1")
            .output()
            .unwrap();
        assert!(out.status.success());
        // Timing columns differ run to run; compare the rest.
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                if cols.len() == 4 {
                    format!("{},{},{}", cols[0], cols[1], cols[3])
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run(), run());
}

#[test]
fn bench_rejects_unknown_suite() {
    let out = bin()
        .args(["bench", "--suite", "unknown-table"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2)); // clap usage error
}
