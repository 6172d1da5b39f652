use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadcong")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn partition_check_reports_zero_violations() {
    let o = run(&["partition-check", "--ell", "5", "--nmax", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["violation_count"], 0);
    assert_eq!(v["report"]["checked"], 2000);
    let s = run(&["--summary", "partition-check", "--ell", "7", "--nmax", "10000"]);
    assert!(stdout(&s).contains("0 violations"));
}

#[test]
fn suitability_flags_condition_four() {
    let o = run(&["suitability", "--k", "2", "--ell", "17", "--N", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["report"]["verdict"], false);
    assert_eq!(v["failing"], serde_json::json!([4]));
}

#[test]
fn usage_and_input_errors_exit_one_with_json() {
    for args in [&["frobnicate"][..], &["hasse"], &["hasse", "--ell", "9"], &["sl2-sim", "--ell", "5", "--gamma", "1,2"]] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert!(err["error"]["message"].is_string());
    }
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verification_failure_exits_two() {
    // One step of a random walk cannot reach an element conjugate to ±gamma0.
    let o = run(&["sl2-sim", "--ell", "5", "--s", "2", "--gamma", "1,1,-1,0", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["found"], false);
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "verification");
}

#[test]
fn sl2_sim_finds_witnesses() {
    let o = run(&["sl2-sim", "--ell", "5", "--s", "2", "--gamma", "1,1,-1,0", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["found"], true);
    assert_eq!(v["witness"]["squares_conjugate"], true);
}

#[test]
fn outputs_are_deterministic_across_threads() {
    let base = ["scan-congruences", "--eta-power", "7", "--ell", "5", "--p-max", "110"];
    let a = run(&base);
    let mut with_threads = vec!["--threads", "1"];
    with_threads.extend(base);
    let b = run(&with_threads);
    with_threads[1] = "3";
    let c = run(&with_threads);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let lines: Vec<&str> = std::str::from_utf8(&a.stdout).unwrap().lines().collect();
    let last: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(last["summary"]["soundness_violations"], serde_json::json!([]));
    assert!(lines.len() >= 2);
    let r1 = run(&["sl2-sim", "--ell", "7", "--s", "2", "--gamma", "2,0,0,4", "--seed", "11"]);
    let r2 = run(&["sl2-sim", "--ell", "7", "--s", "2", "--gamma", "2,0,0,4", "--seed", "11"]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn descriptor_files() {
    let dir = std::env::temp_dir().join(format!("quadcong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"eta": [[1, 5]], "level": 1, "r": 5, "lambda": 2, "ell": 11}"#).unwrap();
    let o = run(&["shimura-lift", "--form", good.to_str().unwrap(), "--t", "5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["terms"][1]["value"], serde_json::json!([-2]));
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"eta": [[1, 5]], "level": 1, "r": 7, "ell": 11}"#).unwrap();
    let o = run(&["shimura-lift", "--form", bad.to_str().unwrap(), "--t", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn small_commands() {
    let o = run(&["eta-multiplier", "--gamma", "1,1,0,1"]);
    assert_eq!(json(&o)["exponent"], 1);
    let o = run(&["hasse", "--ell", "7"]);
    assert_eq!(json(&o)["holds"], false);
    let o = run(&["eta-expand", "--factors", "1:-1", "--prec", "95", "--allow-poles"]);
    let v = json(&o);
    let values: Vec<i64> = v["terms"].as_array().unwrap().iter().map(|t| t["value"][0].as_i64().unwrap()).collect();
    assert_eq!(values, vec![1, 1, 2, 3, 5]);
    let o = run(&["hecke-apply", "--eta-power", "5", "--p", "5", "--prec", "60"]);
    assert_eq!(json(&o)["terms"][0]["value"], serde_json::json!([-6]));
    let o = run(&["atkin-search", "--ell", "5", "--q-max", "5", "--n-max", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["hasse-density", "--x", "10000"]);
    assert!(json(&o)["density"].as_f64().unwrap() > 0.6);
}

#[test]
fn selftest_subset() {
    let o = run(&["selftest", "--only", "1,7,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert_eq!(run(&["selftest", "--only", "42"]).status.code(), Some(1));
}
