use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricmorph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_check_is_a_usage_error() {
    let o = run(&["verify", "BOGUS"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("BOGUS"));
}

#[test]
fn missing_arguments_are_a_usage_error() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unknown_fixture_is_a_usage_error() {
    assert_eq!(run(&["show", "no_such_fixture"]).status.code(), Some(2));
}

#[test]
fn show_fan() {
    let o = run(&["show", "sigma_prime_wp"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("fan sigma_prime_wp: 9 rays, 14 maximal cones"));
}

#[test]
fn show_map_json() {
    let o = run(&["show", "h_star", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matrix"].as_array().unwrap().len(), 4);
    assert_eq!(v["matrix"][0].as_array().unwrap().len(), 5);
}

#[test]
fn show_lattice_points() {
    let o = run(&["show", "delta_star_wp", "--lattice-points", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = v["lattice_point_count"].as_u64().unwrap();
    assert_eq!(v["lattice_points"].as_array().unwrap().len() as u64, n);
    assert!(n > 5);
}

#[test]
fn list_checks_covers_all_ids() {
    let o = run(&["list-checks"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for i in 1..=14 {
        assert!(text.lines().any(|l| l.starts_with(&format!("V{i} "))), "V{i}");
    }
}

#[test]
fn json_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let o = run(&["verify", "V1", "V2", "--serial", "--no-timestamp", "--json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        reports.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let v: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(v["summary"]["pass"], 2);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["checks"][0]["check_id"], "V1");
    assert_eq!(v["checks"][0]["status"], "pass");
    assert!(v.get("generated_at_unix").is_none());
}

#[test]
fn failing_check_sets_exit_code() {
    let o = run(&["verify", "v7", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL  V7"));
}
