use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn upb3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upb3"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(path: &std::path::Path) -> Vec<Value> {
    serde_json::from_str::<Value>(&fs::read_to_string(path).unwrap())
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn filter_runs_only_lhv_claims() {
    let dir = tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = upb3(&["verify", "--filter", "lhv.*", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let claims = report(&json);
    let ids: Vec<&str> = claims.iter().map(|c| c["claim_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for c in &claims {
        let id = c["claim_id"].as_str().unwrap();
        let expected = if id.starts_with("lhv.") { "pass" } else { "skip" };
        assert_eq!(c["status"], expected, "{id}");
        assert!(c["paper_ref"].as_str().is_some_and(|s| !s.is_empty()));
    }
    assert!(claims.iter().filter(|c| c["status"] == "pass").count() >= 8);
}

#[test]
fn full_run_reports_exactly_the_known_failures() {
    let dir = tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = upb3(&["verify", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<String> = report(&json)
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["claim_id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["prep.byproduct_unique", "stationarity.local"]);
    let byproduct = report(&json)
        .into_iter()
        .find(|c| c["claim_id"] == "prep.byproduct")
        .unwrap();
    assert!(byproduct["message"].as_str().unwrap().contains("matched -tau_p/4"));
}

#[test]
fn unwritable_output_is_an_error() {
    let out = upb3(&[
        "verify",
        "--filter",
        "upb.spectrum",
        "--json",
        "/nonexistent-dir/r.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent-dir"));
    let out = upb3(&["orbit", "--csv", "/nonexistent-dir/o.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_configuration_is_rejected() {
    assert_eq!(upb3(&["verify", "--tolerance-flow", "0"]).status.code(), Some(2));
    assert_eq!(upb3(&["verify", "--filter", "("]).status.code(), Some(2));
    assert_eq!(
        upb3(&["orbit", "--samples", "1", "--csv", "/tmp/unused.csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    assert!(upb3(&["orbit", "--samples", "16", "--csv", &p("o1.csv")])
        .status
        .success());
    assert!(upb3(&["orbit", "--samples", "16", "--csv", &p("o2.csv")])
        .status
        .success());
    assert_eq!(fs::read(p("o1.csv")).unwrap(), fs::read(p("o2.csv")).unwrap());
    assert!(upb3(&["bloch", "--csv", &p("b1.csv")]).status.success());
    assert!(upb3(&["bloch", "--csv", &p("b2.csv")]).status.success());
    assert_eq!(fs::read(p("b1.csv")).unwrap(), fs::read(p("b2.csv")).unwrap());
    upb3(&["verify", "--filter", "orbit\\..*", "--json", &p("r1.json")]);
    upb3(&["verify", "--filter", "orbit\\..*", "--json", &p("r2.json")]);
    assert_eq!(fs::read(p("r1.json")).unwrap(), fs::read(p("r2.json")).unwrap());
}

#[test]
fn orbit_csv_layout() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("o.csv");
    assert!(upb3(&["orbit", "--samples", "5", "--csv", path.to_str().unwrap()])
        .status
        .success());
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("t,rho111,rho113,"));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), lines[0].split(',').count());
        assert_eq!(fields[fields.len() - 2..], ["4", "4"]);
        let t: f64 = fields[0].parse().unwrap();
        assert!((0.0..=2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI + 1e-12).contains(&t));
    }
}

#[test]
fn bloch_csv_layout() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("b.csv");
    assert!(upb3(&["bloch", "--csv", path.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,member,qubit,bloch_x,bloch_y,bloch_z");
    assert_eq!(lines.len(), 1 + 3 * 4 * 3);
    // |01+>: qubit 1 along +z, qubit 2 along -z, qubit 3 along +x
    let row = |family: &str, m: &str, q: &str| -> Vec<f64> {
        let line = lines
            .iter()
            .find(|l| l.starts_with(&format!("{family},{m},{q},")))
            .unwrap();
        line.split(',').skip(3).map(|f| f.parse().unwrap()).collect()
    };
    let close = |a: Vec<f64>, b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    assert!(close(row("psi@t=0", "1", "1"), [0.0, 0.0, 1.0]));
    assert!(close(row("psi@t=0", "1", "2"), [0.0, 0.0, -1.0]));
    assert!(close(row("psi@t=0", "1", "3"), [1.0, 0.0, 0.0]));
    assert!(close(row("theta@t=tau_p/4", "4", "2"), [0.0, 0.0, 1.0]));
}
