use std::process::{Command, Output};

use serde_json::Value;

fn qbc5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbc5"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("one JSON object")
}

/// CSV lines after the `#` metadata lines.
fn csv_body(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn teleport_check_passes_with_sixteen_rows() {
    let o = qbc5(&["teleport-check", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_body(&o).len(), 17);
    assert!(stdout(&o).starts_with("# {"));
}

#[test]
fn misordered_basis_fails() {
    let o = qbc5(&["teleport-check", "--misorder-bell-basis"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(I, 1)"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = qbc5(&["teleport-check", "--seed", "11"]);
    let b = qbc5(&["teleport-check", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let a = qbc5(&[
        "babe-conceal",
        "--n",
        "2",
        "--trials",
        "20000",
        "--seed",
        "5",
        "--exec",
        "sequential",
    ]);
    let b = qbc5(&[
        "babe-conceal",
        "--n",
        "2",
        "--trials",
        "20000",
        "--seed",
        "5",
        "--exec",
        "parallel",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = qbc5(&["babe-conceal", "--n", "2", "--trials", "20000", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn honest_protocol_accepts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let o = qbc5(&[
        "run-protocol",
        "--n",
        "2",
        "--N",
        "3",
        "--bit",
        "1",
        "--format",
        "json",
        "--transcript",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["summary"]["verdict"], "accept");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.lines().count(), 3);
    for l in lines.lines() {
        let _: Value = serde_json::from_str(l).unwrap();
    }
}

#[test]
fn flipped_claim_is_rejected() {
    let o = qbc5(&["run-protocol", "--flip-claim", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["summary"]["verdict"], "reject");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&qbc5(&["run-protocol", "--n", "0"])), 2);
    assert_eq!(code(&qbc5(&["run-protocol", "--bit", "2"])), 2);
    assert_eq!(code(&qbc5(&["game", "--p-c", "1.5"])), 2);
    assert_eq!(code(&qbc5(&["nonsense"])), 2);
    assert_eq!(code(&qbc5(&["--help"])), 0);
}

#[test]
fn identity_family_is_fully_cheatable() {
    let o = qbc5(&["adam-opt", "--family", "identity", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!((json(&o)["summary"]["p_a"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn default_family_is_binding_and_stable() {
    let o = qbc5(&["adam-opt", "--stability", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = &json(&o)["summary"];
    let p = s["p_a"].as_f64().unwrap();
    assert!(p < 1.0 - 1e-3);
    assert!(s["doubled_grid_change"].as_f64().unwrap() < 1e-3);
}

#[test]
fn single_pair_babe_respects_the_bound() {
    let o = qbc5(&["babe-conceal", "--n", "1,2,4,8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows = json(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["within_bound"] == true));
}

#[test]
fn unentangled_babe_guesses() {
    let o = qbc5(&[
        "babe-conceal",
        "--strategy",
        "unentangled",
        "--n",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["rows"][0];
    assert!((r["rate"].as_f64().unwrap() - 0.5).abs() <= r["band"].as_f64().unwrap());
}

#[test]
fn ensemble_interior_regime_passes() {
    let o = qbc5(&[
        "ensemble", "--N", "100", "--alpha", "0.2,0.5", "--m", "10,20", "--delta", "0.5,0.75",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_body(&o).len(), 9);
}

#[test]
fn ensemble_boundary_is_reported() {
    let o = qbc5(&[
        "ensemble", "--N", "100", "--alpha", "0.1", "--m", "10", "--delta", "0.5", "--format", "json",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["rows"][0]["within_bound"], false);
}

#[test]
fn empty_sweeps_write_headers() {
    for args in [
        &["ensemble", "--m", ""][..],
        &["game", "--p-c", ""][..],
        &["babe-conceal", "--n", ""][..],
    ] {
        let o = qbc5(args);
        assert_eq!(code(&o), 0);
        assert_eq!(csv_body(&o).len(), 1, "{args:?}");
    }
}

#[test]
fn game_closed_form_matches_oracle_when_always_cheating() {
    let o = qbc5(&["game", "--p-c", "1", "--model", "unconditional", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let valid: Vec<&Value> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["valid"] == true)
        .collect();
    assert!(valid.len() >= 6);
    for r in valid {
        assert!(r["closed_vs_oracle"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("game.conf");
    let out = dir.path().join("game.json");
    std::fs::write(
        &conf,
        "subcommand = game\np_a = 0.2\np_c = 1\np_d = 0.5\nn = 10\nformat = json\nseed = 4\n",
    )
    .unwrap();
    let o = qbc5(&["--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["config"]["seed"], 4);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    // a later flag overrides the file
    let o = qbc5(&["--config", conf.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(json(&o)["meta"]["config"]["seed"], 9);
}
