use std::fs;
use std::path::Path;
use std::process::Command;

use tavis::scenario::sha256_hex;

fn tavis() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tavis"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> i32 {
    tavis()
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn scenarios_lists_every_builtin() {
    let out = tavis().arg("scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ResonantBifurcation",
        "NonresonantSwitching",
        "ChaoticMotion",
        "PurityAdiabatic",
        "PurityWeakRegular",
        "PurityWeakChaotic",
        "Custom",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"scenario": "Custom", "extra": true}"#,
        r#"{"scenario": "Custom", "integrate": {"t_max": -1}}"#,
        r#"{"scenario": "Custom", "params": {"zeta": 0.2, "Delta": 0.5}}"#,
        "not json",
    ] {
        let cfg = write_config(dir.path(), body);
        assert_eq!(run(&cfg, &dir.path().join("out"), &[]), 2, "{body}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(run(&missing, &dir.path().join("out"), &[]), 2);
}

#[test]
fn numerical_failure_exits_3() {
    // A lag window longer than a tenth of the record cannot be analysed.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "ChaoticMotion", "integrate": {"t_max": 20}}"#);
    assert_eq!(run(&cfg, &dir.path().join("out"), &[]), 3);
}

#[test]
fn invariant_violation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "ChaoticMotion", "integrate": {"rtol": 1e-4, "atol": 1e-6}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]), 4);
    assert!(!manifest(&out)["violations"].as_array().unwrap().is_empty());
}

#[test]
fn outputs_are_deterministic_and_checksummed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "PurityWeakChaotic", "quantum": {"realizations": 2000}, "seed": 7}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&cfg, &a, &[]), 0);
    assert_eq!(run(&cfg, &b, &[]), 0);
    let m = manifest(&a);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.len() >= 3);
    for o in outputs {
        let name = o["file"].as_str().unwrap();
        let bytes = fs::read(a.join(name)).unwrap();
        assert_eq!(bytes, fs::read(b.join(name)).unwrap(), "{name} differs between runs");
        assert_eq!(o["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
    assert_eq!(m["config"]["seed"], 7);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));

    // The seed flag overrides the config and changes the ensemble.
    let c = dir.path().join("c");
    assert_eq!(run(&cfg, &c, &["--seed", "8"]), 0);
    assert_eq!(manifest(&c)["config"]["seed"], 8);
    assert_ne!(fs::read(a.join("q_ensemble.csv")).unwrap(), fs::read(c.join("q_ensemble.csv")).unwrap());
}

#[test]
fn decoupled_custom_run_stays_pure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "Custom", "initial": {"x": 1.5707963267948966, "p": 0.0}, "integrate": {"t_max": 10, "dt_out": 0.1}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]), 0);
    let csv = fs::read_to_string(out.join("purity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,purity"));
    for line in lines {
        let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((p - 1.0).abs() < 1e-10, "{line}");
    }
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("tau,x,p,u,v,sz\n"));
    let density = fs::read_to_string(out.join("density.csv")).unwrap();
    assert!(density.starts_with("t,rho11,rho22,re_rho12,im_rho12\n"));
}

#[test]
fn chaos_run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "ChaoticMotion"}"#);
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]), 0);
    assert!(fs::read_to_string(out.join("autocorr.csv")).unwrap().starts_with("lag,corr\n"));
    assert!(fs::read_to_string(out.join("spectrum.csv")).unwrap().starts_with("omega,power\n"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    for key in ["tau_c", "fit_residual", "chaotic"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    // 17 significant digits in the trajectory.
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let field = traj.lines().nth(2).unwrap().split(',').nth(1).unwrap();
    let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{field}");
}

#[test]
fn bifurcation_manifest_reports_both_times() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "ResonantBifurcation"}"#);
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]), 0);
    let m = manifest(&out);
    let tau_b = m["summary"]["tau_b"].as_f64().unwrap();
    assert!((tau_b - 4.19).abs() < 0.005);
    assert!(m["summary"]["singularity_tau"].as_f64().is_some());
    assert_eq!(m["config"]["params"]["R0"], 20.0);
}
