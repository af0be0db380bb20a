use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scen(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmpadic")).args(args).output().expect("binary runs")
}

fn tmp_ini(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("cmpadic-{}-{name}.ini", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn malformed_scenario_exits_2_with_location() {
    let p = tmp_ini("bad", "[prime]\np = 11\n\n[aux]\nlambda = nineteen\n");
    let o = run(&["stabilize", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":5:") && err.contains("[aux] lambda"), "{err}");

    let p = tmp_ini("unknown", "[prime]\np = 11\nq = 3\n");
    let o = run(&["stabilize", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:"));
}

#[test]
fn hypothesis_violation_exits_3() {
    let o = run(&["stabilize", "--scenario", scen("inert_prime.ini").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("must split"));
}

#[test]
fn budget_exits_4() {
    let p = tmp_ini("budget", "[budget]\nqexp_bound = 500\nmax_qexp_bound = 200\n");
    let o = run(&["family", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["family", "--padic-precision", "400"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["local-integral", "--scenario", scen("fixture.ini").to_str().unwrap()]);
    let b = run(&["local-integral", "--scenario", scen("fixture.ini").to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_schema() {
    let o = run(&["verify-euler", "--qexp-bound", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["subcommand"], "verify-euler");
    assert_eq!(r["scenario_hash"].as_str().unwrap().len(), 64);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        for k in ["name", "anchor", "lhs", "rhs", "error", "tolerance", "pass", "inputs"] {
            assert!(c.get(k).is_some(), "missing {k}");
        }
    }
    assert_eq!(r["summary"]["passed"], 4);
}

#[test]
fn family_and_newform_file() {
    let o = run(&["family", "--scenario", scen("fixture.ini").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["stabilize", "--scenario", scen("newform_file.ini").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_filter_and_out() {
    let out = std::env::temp_dir().join(format!("cmpadic-{}-out.json", std::process::id()));
    let o = run(&["constants", "--check", "constants.e-p", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["name"].as_str().unwrap().starts_with("constants.e-p")));
    let o = run(&["constants", "--check", "nothing-matches"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn known_failure_exits_1() {
    let o = run(&["constants", "--check", "constants.star-spot"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["summary"]["failed"], 1);
}
