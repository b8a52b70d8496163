//! End-to-end tests of the `nsverify` binary.

use std::path::Path;
use std::process::{Command, Output};

fn nsverify(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsverify"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn presets_lists_and_prints() {
    let dir = tempfile::tempdir().unwrap();
    let o = nsverify(&["presets"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for name in [
        "taylor-green-2d",
        "shear-counterexample",
        "random",
        "box-vortex",
    ] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
    let o = nsverify(&["presets", "separable"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("viscosity"));
    assert!(!nsverify(&["presets", "nope"], dir.path()).status.success());
}

#[test]
fn run_writes_reports_and_flags_do_not_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = nsverify(
        &[
            "run",
            "shear-counterexample",
            "--check",
            "coincidence",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("coincidence"));
    let out = dir.path().join("out");
    for f in ["summary.json", "coincidence.json", "coincidence.csv"] {
        assert!(out.join(f).exists(), "{f} not written");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["checks"]["coincidence"]["flag"].as_u64().unwrap() > 0);
}

#[test]
fn exported_preset_runs_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let toml = stdout(&nsverify(&["presets", "rest"], dir.path()));
    std::fs::write(dir.path().join("rest.toml"), toml).unwrap();
    let o = nsverify(
        &[
            "run",
            "rest.toml",
            "--all",
            "--format",
            "json",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("o/max_principle.json").exists());
    assert!(!dir.path().join("o/max_principle.csv").exists());
}

#[test]
fn invalid_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = nsverify(&["run", "compressive", "--out", "o"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("solenoidal"));

    let o = nsverify(
        &[
            "run",
            "compressive",
            "--auto-project",
            "--check",
            "apriori",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = nsverify(&["run", "missing.toml"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn sweep_exit_status_reflects_failed_cells() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("ok.toml"),
        "base = \"rest\"\n[sweep]\nviscosity = [0.05, 0.1]\n",
    )
    .unwrap();
    let o = nsverify(
        &["sweep", "ok.toml", "--check", "max_principle", "--out", "a"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("a/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    std::fs::write(
        dir.path().join("bad.toml"),
        "base = \"rest\"\n[sweep]\ndt = [0.1, 5.0]\n",
    )
    .unwrap();
    let o = nsverify(
        &[
            "sweep",
            "bad.toml",
            "--check",
            "max_principle",
            "--out",
            "b",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 of 2 cells failed"));
}

#[test]
fn analyze_reads_a_field_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = nsverify::solver::presets::taylor_green_grid(32).unwrap();
    let field = dir.path().join("separable.nsvf");
    nsverify::fields::io::save_vector(&field, &nsverify::solver::presets::separable_velocity(&g))
        .unwrap();
    let o = nsverify(&["analyze", "separable.nsvf", "--out", "a"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("energy maxima"));
    assert!(dir.path().join("a/coincidence.json").exists());
    assert!(dir.path().join("a/pressure_identity.json").exists());

    let o = nsverify(
        &[
            "analyze",
            "separable.nsvf",
            "--check",
            "stability",
            "--out",
            "a",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
}
