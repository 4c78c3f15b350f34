//! End-to-end runs of the installed binary: exit codes, artifact layout,
//! error wording, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn whlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn pseudospec_emits_the_full_node_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = whlab(&[
        "pseudospec",
        "--set",
        "grid.extent=2",
        "--set",
        "grid.count=40",
        "--out",
        out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let csv = std::fs::read_to_string(dir.path().join("pseudospectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "z_re,z_im,sigma_min");
    // default rectangle is 81 nodes per side
    assert_eq!(lines.len(), 1 + 81 * 81);

    let sidecar = std::fs::read_to_string(dir.path().join("pseudospectrum.json")).unwrap();
    assert!(sidecar.contains("\"per_side\":81"), "{sidecar}");
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("pseudospectrum.csv"), "{manifest}");
    assert!(manifest.contains("report.json"), "{manifest}");
}

#[test]
fn malformed_kernel_names_the_first_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.csv");
    // spacing jumps from 0.05 to 0.07 at the fifth file row
    std::fs::write(
        &kernel,
        "t,re,im\n-0.10,0.0,0.0\n-0.05,1.0,0.0\n0.00,2.0,0.0\n0.07,1.0,0.0\n0.12,0.0,0.0\n",
    )
    .unwrap();
    let out = whlab(&[
        "symbol",
        "--set",
        &format!("operator.kernel={}", kernel.display()),
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("row 5"), "{err}");
}

#[test]
fn unknown_config_key_fails_fast() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlab(&[
        "norms",
        "--set",
        "grid.spacing=0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("grid.spacing"));
    assert!(
        !dir.path().join("report.json").exists(),
        "no report on configuration errors"
    );
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = whlab(&["growth", "--config", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let out = whlab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = whlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic_across_runs() {
    let run = |label: &str, dir: &Path| {
        let out = whlab(&["norms", "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{label}: {}", stderr_of(&out));
        std::fs::read(dir.join("report.json")).unwrap()
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    assert_eq!(run("first", d1.path()), run("second", d2.path()));
}

#[test]
fn failed_check_exits_two() {
    // a packet four times wider than the pinned bandwidth leaks too much
    // spectrum out of every band the ladder offers
    let dir = tempfile::tempdir().unwrap();
    let out = whlab(&[
        "witness",
        "--set",
        "symbol.b=2.0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"overall\":\"fail\""), "{report}");
}
