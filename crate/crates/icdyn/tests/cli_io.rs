//! Black-box tests of the `icdyn` binary: argument handling, config and
//! environment precedence, CSV schemas, manifest determinism, and exit
//! codes, all through real subprocesses.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::tempdir;

/// Command for the compiled binary with the seed environment cleared, so
/// a polluted test environment cannot leak into precedence checks.
fn icdyn() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_icdyn"));
    cmd.env_remove("ICDYN_SEED");
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn manifest(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("manifest.json")).expect("manifest written");
    serde_json::from_str(&text).expect("manifest is valid json")
}

#[test]
fn predict_decay_prints_every_applicable_variant() {
    let (code, stdout, _) = run(icdyn().args(["predict", "decay", "--m", "2000"]));
    assert_eq!(code, 0);
    for needle in [
        "lower-frequency",
        "upper-frequency",
        "main-text",
        "appendix",
        "exact-numeric",
        "5.0000",
        "516.3978",
        "407.2764",
    ] {
        assert!(stdout.contains(needle), "missing {needle:?} in:\n{stdout}");
    }
    // The closed forms sit outside their validity regime at these inputs;
    // the numeric root does not.
    let flag = |kind: &str, variant: &str| {
        let row = stdout
            .lines()
            .find(|l| l.starts_with(kind) && l.contains(variant))
            .unwrap_or_else(|| panic!("no {kind}/{variant} row in:\n{stdout}"));
        row.contains(" yes ") || !row.contains(" no ")
    };
    assert!(!flag("upper-frequency", "appendix"), "appendix row should be out of regime");
    assert!(flag("upper-frequency", "exact-numeric"), "numeric row should be in regime");
}

#[test]
fn predict_decay_with_zero_noise_reports_zero_lower_boundary() {
    let (code, stdout, _) = run(icdyn().args(["predict", "decay", "--sigma", "0"]));
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 2, "header plus one row:\n{stdout}");
    let row = stdout.lines().nth(1).expect("one data row");
    assert!(row.starts_with("lower-frequency"), "row: {row}");
    assert!(row.contains("0.0000"), "zero boundary: {row}");
}

#[test]
fn predict_zero_noise_with_record_length_names_the_bad_parameter() {
    let (code, _, stderr) =
        run(icdyn().args(["predict", "decay", "--sigma", "0", "--m", "2000"]));
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("sigma"), "diagnostic names the parameter: {stderr}");
}

#[test]
fn predict_dimension_case2_prints_both_boundaries() {
    let (code, stdout, _) = run(icdyn().args(["predict", "dimension", "case2"]));
    assert_eq!(code, 0);
    for needle in
        ["dimension-case2-low", "dimension-case2-high", "6.4008", "225.5274", "7.2450", "153.3035"]
    {
        assert!(stdout.contains(needle), "missing {needle:?} in:\n{stdout}");
    }
}

#[test]
fn sweep_writes_schema_stable_csv_and_manifest() {
    let dir = tempdir().expect("tempdir");
    let out = dir.path().join("run");
    let (code, stdout, _) = run(icdyn().args([
        "sweep", "decay", "--m", "50", "--grid", "10", "--trials", "5", "--out",
    ]).arg(&out));
    assert_eq!(code, 0);
    assert!(stdout.contains("wrote decay_sweep.csv"), "stdout: {stdout}");

    let csv = fs::read_to_string(out.join("decay_sweep.csv")).expect("csv written");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("axis_name,axis_value,model,mean_aic,selection_proportion,n_trials,n_invalid")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2, "one grid point, two models:\n{csv}");
    for row in &rows {
        assert!(row.starts_with("f,1.0000000000000000e1,"), "row: {row}");
        assert!(row.ends_with(",5,0"), "trial counts echoed: {row}");
    }

    let m = manifest(&out);
    assert_eq!(m["command"]["name"], "sweep");
    assert_eq!(m["run"]["seed"], 42, "default seed");
    assert_eq!(m["scenario"]["m"], 50);
    assert!(m.get("timestamp").is_none(), "manifests carry no wall-clock state");
}

#[test]
fn sweep_reruns_are_byte_identical_for_a_fixed_seed() {
    let dir = tempdir().expect("tempdir");
    let args = |out: &Path| {
        let mut cmd = icdyn();
        cmd.args([
            "sweep", "decay", "--m", "100", "--grid", "1:100:3", "--trials", "10", "--seed", "7",
            "--out",
        ])
        .arg(out);
        cmd
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&mut args(&a)).0, 0);
    assert_eq!(run(&mut args(&b)).0, 0);
    let bytes_a = fs::read(a.join("decay_sweep.csv")).expect("csv a");
    let bytes_b = fs::read(b.join("decay_sweep.csv")).expect("csv b");
    assert_eq!(bytes_a, bytes_b, "same seed, same bytes");
}

#[test]
fn seed_precedence_is_flag_then_config_then_environment() {
    let dir = tempdir().expect("tempdir");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults for this machine\nseed=100\ntrials=5\n").expect("config written");
    let sweep = |extra: &[&str], env_seed: Option<&str>, out: &Path| {
        let mut cmd = icdyn();
        cmd.args(["sweep", "decay", "--m", "50", "--grid", "10", "--out"]).arg(out);
        cmd.args(extra);
        if let Some(seed) = env_seed {
            cmd.env("ICDYN_SEED", seed);
        }
        let (code, _, stderr) = run(&mut cmd);
        assert_eq!(code, 0, "stderr: {stderr}");
        manifest(out)
    };

    let cfg_arg = cfg.to_str().expect("utf-8 path");
    let m = sweep(&["--config", cfg_arg], Some("77"), &dir.path().join("o1"));
    assert_eq!(m["run"]["seed"], 100, "config beats environment");
    assert_eq!(m["run"]["trials"], 5, "config supplies trials");

    let m = sweep(&["--config", cfg_arg, "--seed", "5"], Some("77"), &dir.path().join("o2"));
    assert_eq!(m["run"]["seed"], 5, "flag beats config");

    let m = sweep(&[], Some("77"), &dir.path().join("o3"));
    assert_eq!(m["run"]["seed"], 77, "environment beats the built-in default");

    let m = sweep(&[], None, &dir.path().join("o4"));
    assert_eq!(m["run"]["seed"], 42, "built-in default");
}

#[test]
fn malformed_config_and_environment_are_parameter_errors() {
    let dir = tempdir().expect("tempdir");
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "sigma=3\n").expect("config written");
    let (code, _, stderr) =
        run(icdyn().args(["sweep", "decay", "--config"]).arg(&cfg).args(["--out"]).arg(dir.path()));
    assert_eq!(code, 2, "unknown config key: {stderr}");
    assert!(stderr.contains("sigma"), "diagnostic names the key: {stderr}");

    let (code, _, stderr) = run(icdyn()
        .args(["sweep", "decay", "--m", "50", "--grid", "10", "--trials", "1", "--out"])
        .arg(dir.path().join("x"))
        .env("ICDYN_SEED", "not-a-number"));
    assert_eq!(code, 2, "unparsable seed env: {stderr}");

    let (code, _, _) = run(icdyn().args(["sweep", "decay", "--variant", "bogus"]));
    assert_eq!(code, 2, "unknown variant is a usage error");
}

#[test]
fn sweep_with_invalid_majority_still_writes_then_exits_three() {
    let dir = tempdir().expect("tempdir");
    let out = dir.path().join("degenerate");
    // Zero signal and zero noise: every trial yields a constant record the
    // noise fit rejects as degenerate, so every point is invalid-majority.
    let (code, _, stderr) = run(icdyn()
        .args([
            "sweep", "decay", "--x0", "0", "--sigma", "0", "--m", "100", "--grid", "1",
            "--trials", "4", "--out",
        ])
        .arg(&out));
    assert_eq!(code, 3, "stderr: {stderr}");
    assert!(stderr.contains("invalid"), "stderr explains the exit: {stderr}");
    assert!(out.join("decay_sweep.csv").exists(), "results are written before flagging");
    assert!(out.join("manifest.json").exists());
}

#[test]
fn reproduce_fig1_writes_artifacts_and_reports_checks() {
    let dir = tempdir().expect("tempdir");
    let out = dir.path().join("fig1");
    let (code, stdout, stderr) =
        run(icdyn().args(["reproduce", "fig1", "--trials", "8", "--out"]).arg(&out));
    assert_eq!(code, 0, "stdout: {stdout}\nstderr: {stderr}");
    for check in ["lower-crossover", "regime-shape", "upper-crossover"] {
        assert!(stdout.contains(&format!("[PASS] fig1/{check}")), "stdout: {stdout}");
    }

    let crossovers =
        fs::read_to_string(out.join("fig1_crossovers.csv")).expect("crossover table written");
    let mut lines = crossovers.lines();
    assert_eq!(lines.next(), Some("kind,empirical_value,theory_value,variant,relative_gap"));
    assert!(crossovers.contains("lower-frequency"), "{crossovers}");
    assert!(crossovers.contains("upper-frequency"), "{crossovers}");

    let sweep = fs::read_to_string(out.join("fig1_sweep.csv")).expect("sweep written");
    assert!(sweep.starts_with("axis_name,axis_value,model,"), "{sweep}");

    let m = manifest(&out);
    assert_eq!(m["command"]["figure"], "fig1");
    assert_eq!(m["run"]["trials"], 8);
    let outputs: Vec<&str> =
        m["outputs"].as_array().expect("outputs list").iter().filter_map(Value::as_str).collect();
    assert_eq!(outputs, ["fig1_sweep.csv", "fig1_crossovers.csv"]);
}

#[test]
fn lyapunov_subcommand_prints_exponent_and_passes() {
    let (code, stdout, _) = run(icdyn().arg("lyapunov"));
    assert_eq!(code, 0);
    assert!(stdout.contains("largest Lyapunov exponent:"), "stdout: {stdout}");
    assert!(stdout.contains("[PASS]"), "stdout: {stdout}");
}

#[test]
fn help_lists_all_subcommands() {
    let (code, stdout, _) = run(icdyn().arg("--help"));
    assert_eq!(code, 0);
    for sub in ["predict", "sweep", "reproduce", "lyapunov"] {
        assert!(stdout.contains(sub), "help lists {sub}: {stdout}");
    }
}
