use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symplectic-hecke"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn cosets_total_n2_p3() {
    let v = json(&["cosets", "--n", "2", "--p", "3"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "cosets");
    assert_eq!(v["params"]["n"], 2);
    assert_eq!(v["results"]["total"], 120);
    let tc = &v["results"]["type_counts"];
    let sum: u64 = ["I", "II", "III"].iter().map(|k| tc[k].as_u64().unwrap()).sum();
    assert_eq!(sum, 120);
    let coeffs: Vec<i64> = v["results"]["structure_constants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["coefficient"].as_i64().unwrap())
        .collect();
    assert_eq!(coeffs, [1, 4, 2, 120]);
}

#[test]
fn cosets_oracle_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reps.json");
    let v = json(&[
        "cosets",
        "--n",
        "1",
        "--p",
        "5",
        "--verify-oracle",
        "--dump-reps",
        path.to_str().unwrap(),
    ]);
    assert_eq!(v["results"]["oracle"]["matches"], true);
    assert_eq!(v["results"]["oracle"]["total"], 30);
    let dump: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let reps = dump["representatives"].as_array().unwrap();
    assert_eq!(reps.len(), 30);
    let m = reps[0]["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 2);
    assert!(m[0][0].as_str().unwrap().contains("/p^"));
}

#[test]
fn product_with_cross_checks() {
    let v = json(&["product", "--n", "1", "--p", "3", "--pairwise", "--degrees"]);
    for t in v["results"]["terms"].as_array().unwrap() {
        assert_eq!(t["coefficient"], t["pairwise"]);
        assert_eq!(t["coefficient"], t["expected"]);
    }
    let b = &v["results"]["degree_balance"];
    assert_eq!(b["sum"], b["volume_squared"]);
}

#[test]
fn lfactor_float_residual() {
    let v = json(&["lfactor", "--n", "1", "--p", "3", "--theta", "1.5707963"]);
    let r = &v["results"];
    assert_eq!(r["mode"], "float");
    assert!(r["identity_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["inverse_factor"].as_array().unwrap().len(), 4);
    assert_eq!(r["a_F"].as_array().unwrap().len(), 7);
    assert_eq!(r["b_F"].as_array().unwrap().len(), 6);
}

#[test]
fn lfactor_exact_residual_is_zero() {
    let v = json(&["lfactor", "--n", "2", "--p", "5", "--theta", "pi/3,2pi/3"]);
    let r = &v["results"];
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["identity_residual"].as_f64().unwrap(), 0.0);
    assert_eq!(r["identity_residual_exact"], "0/1");
    assert_eq!(r["exact"]["a_F"][0], "1/1");
}

#[test]
fn floats_have_twelve_digits() {
    let out = run(&["measure", "--n", "1", "--p", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let z = v["results"]["normalization_constant"].as_f64().unwrap();
    let digits: String = z.to_string().chars().filter(char::is_ascii_digit).collect();
    assert!(digits.trim_start_matches('0').len() <= 12, "{z}");
}

#[test]
fn measure_moments_match_coset_volume() {
    let v = json(&["measure", "--n", "2", "--p", "3", "--moments", "2"]);
    let m = &v["results"]["moments"];
    let second = m["values"][1].as_f64().unwrap();
    assert!((second / m["coset_volume"].as_f64().unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn measure_samples_csv() {
    let out = run(&[
        "measure", "--n", "2", "--p", "inf", "--sample", "5", "--seed", "7", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta_1,theta_2");
    assert_eq!(lines.len(), 6);
    let again = run(&[
        "measure", "--n", "2", "--p", "inf", "--sample", "5", "--seed", "7", "--format", "csv",
    ]);
    assert_eq!(text.as_bytes(), &again.stdout[..]);
}

#[test]
fn measure_compare_sato_tate() {
    let v = json(&["measure", "--n", "1", "--compare-st", "--p-list", "3,11,101"]);
    assert_eq!(v["results"]["sato_tate"]["monotone"], true);
    assert_eq!(v["results"]["sato_tate"]["distances"].as_array().unwrap().len(), 3);
}

#[test]
fn leveldensity_one_level() {
    let v = json(&["leveldensity", "--ell", "1", "--beta", "0.5"]);
    let r = &v["results"];
    assert!((r["integral"].as_f64().unwrap() - 0.375).abs() < 1e-6);
    assert_eq!(r["closed_form"].as_f64().unwrap(), 0.375);
    assert_eq!(r["vanishing_bound"].as_f64().unwrap(), 1.5);
}

#[test]
fn leveldensity_ensemble_is_deterministic() {
    let args = [
        "leveldensity",
        "--beta",
        "0.5",
        "--ensemble-dim",
        "8",
        "--trials",
        "50",
        "--seed",
        "3",
    ];
    let a = run(&args);
    let b = bin().args(args).env("SYMPLECTIC_HECKE_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["results"]["ensemble_stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn leveldensity_two_level() {
    let v = json(&["leveldensity", "--ell", "2", "--beta", "0.3,0.4"]);
    let r = &v["results"];
    assert!((r["integral"].as_f64().unwrap() - r["fourier_side"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn counting_report() {
    let v = json(&["counting", "--N", "5", "--n", "2"]);
    let r = &v["results"];
    assert_eq!(r["admissibility"]["admissible"], true);
    assert_eq!(r["a_n"], "32");
    assert_eq!(r["c_n"]["within_bounds"], true);
    assert!(r["c_n"]["value"].as_str().unwrap().contains('/'));
    assert_eq!(r["partition_identity"]["failures"].as_array().unwrap().len(), 0);
    let nf = r["newform_fraction"].as_f64().unwrap();
    assert!((nf - 0.7457).abs() < 1e-3);
}

#[test]
fn counting_reports_inadmissible_level() {
    let v = json(&["counting", "--N", "65", "--n", "1"]);
    assert_eq!(v["results"]["admissibility"]["admissible"], false);
    assert!(v["results"]["newform_fraction"].is_null());
}

#[test]
fn verify_quick_passes() {
    let out = run(&["verify", "--quick", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,passed,detail\n"));
    assert!(!text.contains(",false,"));
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["cosets", "--n", "2", "--p", "4"][..],
        &["cosets", "--n", "2", "--p", "2"],
        &["cosets", "--n", "2"],
        &["lfactor", "--n", "2", "--p", "3", "--theta", "0.5"],
        &["lfactor", "--n", "1", "--p", "3", "--theta", "4.0"],
        &["leveldensity", "--beta", "1.5"],
        &["leveldensity", "--ell", "3", "--beta", "0.5"],
        &["leveldensity", "--beta", "0.5", "--ensemble-dim", "7"],
        &["measure", "--p", "9"],
        &["counting", "--N", "0", "--n", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failed_check_exits_3() {
    // A tolerance no floating residual can meet.
    let out = run(&["lfactor", "--n", "1", "--p", "3", "--theta", "1.1", "--tol=-1"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["identity_ok"], false);
}

#[test]
fn bad_thread_count_exits_2() {
    let out = bin()
        .args(["verify", "--quick"])
        .env("SYMPLECTIC_HECKE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "format = \"json\"\nn = 2\n[cosets]\np = 5\n").unwrap();
    let cfg = path.to_str().unwrap();
    let v = json(&["cosets", "--config", cfg]);
    assert_eq!(v["results"]["total"], 780);
    let v = json(&["--config", cfg, "cosets", "--p", "3"]);
    assert_eq!(v["results"]["total"], 120);
    assert_eq!(v["params"]["p"], 3);
}

#[test]
fn config_unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "bogus = 1\n").unwrap();
    let out = run(&["verify", "--quick", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["counting", "--N", "7", "--n", "1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "counting");
}
