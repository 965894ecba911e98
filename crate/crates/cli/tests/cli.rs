use std::process::{Command, Output};

use serde_json::Value;

fn sliceball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sliceball"))
        .args(args)
        .env_remove("SLICEBALL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn quat(v: &Value) -> [f64; 4] {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn full_verify_passes_with_defaults() {
    let o = sliceball(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines = json_lines(&o);
    let summary = &lines.last().unwrap()["summary"];
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["samples"], 1000);
    for check in lines.iter().filter(|l| l.get("pass").is_some()) {
        for key in ["suite", "name", "paper_anchor", "max_error", "tolerance"] {
            assert!(check.get(key).is_some(), "missing {key} in {check}");
        }
    }
}

#[test]
fn noninvariance_filter_reports_violation_found() {
    let o = sliceball(&["verify", "noninvariance"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    let witness = lines.iter().find(|l| l["name"].as_str().is_some_and(|n| n.starts_with("witness"))).unwrap();
    assert_eq!(witness["pass"], true);
    assert!(witness["max_error"].as_f64().unwrap() > 1.0);
}

#[test]
fn corrupted_tolerance_fails_with_errors() {
    let o = sliceball(&["verify", "thm-", "--tol", "1e-20", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(1));
    let lines = json_lines(&o);
    let failed: Vec<_> = lines.iter().filter(|l| l["pass"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|l| l["max_error"].as_f64().unwrap() > 1e-20));
}

#[test]
fn unknown_suite_is_usage_error() {
    let o = sliceball(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no suite matches"));
}

#[test]
fn reports_are_deterministic() {
    let a = sliceball(&["verify", "hardy", "--samples", "100"]);
    let b = sliceball(&["verify", "hardy", "--samples", "100"]);
    assert_eq!(a.stdout, b.stdout);
    let f = sliceball(&["sample-field", "--grid", "9", "--format", "json"]);
    let g = sliceball(&["sample-field", "--grid", "9", "--format", "json"]);
    assert_eq!(f.stdout, g.stdout);
}

#[test]
fn seed_from_environment_and_flag() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sliceball"));
        cmd.args(["verify", "quat-multiplicativity", "--samples", "10"]).args(extra).env_remove("SLICEBALL_SEED");
        if let Some(seed) = env {
            cmd.env("SLICEBALL_SEED", seed);
        }
        let lines = json_lines(&cmd.output().unwrap());
        lines.last().unwrap()["summary"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), 7);
    assert_eq!(run(Some("11"), &[]), 11);
    assert_eq!(run(Some("11"), &["--seed", "3"]), 3);
}

#[test]
fn field_g_hits_064_at_half_i() {
    let o = sliceball(&["sample-field", "--tensor", "G", "--unit", "[0,1,0,0]", "--grid", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "q_w,q_x,q_y,q_z,alpha_w,alpha_x,alpha_y,alpha_z,beta_w,beta_x,beta_y,beta_z,H_w,H_x,H_y,H_z,G,Omega_x,Omega_y,Omega_z"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let row = rows.iter().find(|r| r[..4] == [0.0, 0.5, 0.0, 0.0]).unwrap();
    assert!((row[16] - 0.64).abs() < 1e-15);
}

#[test]
fn field_ghat_and_delta0() {
    let o = sliceball(&["sample-field", "--tensor", "Ghat", "--grid", "3", "--alpha", "[1,0,0,0]", "--beta", "[1,0,0,0]", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let origin = rows.iter().find(|r| r["q_w"] == 0.0 && r["q_x"] == 0.0).unwrap();
    assert_eq!(origin["Ghat"], 1.0);
    assert!(origin.get("G").is_some() && origin.get("Omega_z").is_some());

    let o = sliceball(&["sample-field", "--tensor", "delta0", "--grid", "11", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    for r in &rows {
        let q = [r["q_w"].as_f64().unwrap(), r["q_x"].as_f64().unwrap(), r["q_y"].as_f64().unwrap(), r["q_z"].as_f64().unwrap()];
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r["delta0"].as_f64().unwrap() - norm).abs() < 1e-10);
    }
}

#[test]
fn field_rejects_non_unit_slice() {
    let o = sliceball(&["sample-field", "--unit", "[0,1,1,0]"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sliceball(&["sample-field", "--grid", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_canonical_sends_a_to_zero() {
    let o = sliceball(&["transform", "--map", r#"{"a":[0,0.5,0,0],"u":[1,0,0,0]}"#, "--q", "[0,0.5,0,0]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(quat(&v["result"]).iter().all(|x| x.abs() < 1e-15));
    assert_eq!(quat(&v["q"]), [0.0, 0.5, 0.0, 0.0]);
}

#[test]
fn transform_rejects_invalid_matrix() {
    let map = r#"{"a":[1.5,0,0,0],"b":[0,0,0,0],"c":[0,0,0,0],"d":[1,0,0,0]}"#;
    let o = sliceball(&["transform", "--map", map, "--q", "[0,0,0,0]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("|a|^2 - |b|^2 = 1"));
}

#[test]
fn distance_from_origin() {
    let o = sliceball(&["distance", "--p", "[0,0,0,0]", "--q", "[0,0.3,0.4,0]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["delta"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!(v.get("N_used").is_some() && v.get("tail_bound").is_some());
}

#[test]
fn distance_outside_ball_is_error() {
    let o = sliceball(&["distance", "--p", "[1,0,0,0]", "--q", "[0,0,0,0]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn series_star_square() {
    let f = "[[0,0,0,0],[0,1,0,0]]";
    let o = sliceball(&["series", "star_mul", "--f", f, "--g", f]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let coeffs: Vec<[f64; 4]> = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(coeffs, vec![[0.0; 4], [0.0; 4], [-1.0, 0.0, 0.0, 0.0]]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let o = sliceball(&["sample-field", "--grid", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("q_w,"));
}
