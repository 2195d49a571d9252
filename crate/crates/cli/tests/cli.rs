use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mean-king"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bound_prints_both_values() {
    for (d, expected) in [("5", 0.6315), ("8", 0.4972), ("4", 0.7)] {
        let out = run(&["bound", "--d", d, "--format", "json"]);
        assert_eq!(code(&out), 0);
        let v = json_stdout(&out);
        let a = v["aravind_bound"].as_f64().unwrap();
        assert!((a - expected).abs() < 5e-5, "d = {d}: {a}");
        assert!((a - v["theorem_bound"].as_f64().unwrap()).abs() < 1e-15);
    }
    let human = stdout(&run(&["bound", "--d", "4"]));
    assert!(human.contains("0.700000"), "{human}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["bound", "--d", "1"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["bound", "--d", "4", "--bogus"])), 2);
    assert_eq!(code(&run(&["verify-mub", "--d", "6"])), 2);
}

#[test]
fn verify_mub_builtin_and_broken_file() {
    assert_eq!(code(&run(&["verify-mub", "--d", "4"])), 0);
    assert_eq!(code(&run(&["verify-mub", "--d", "7"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("family.json");
    assert_eq!(code(&run(&["verify-mub", "--d", "3", "--out", p(&file)])), 0);
    let mut family: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    // Replace basis 2, vector 1 by basis 1, vector 1.
    family["bases"][2][0] = family["bases"][1][0].clone();
    std::fs::write(&file, family.to_string()).unwrap();
    let out = run(&["verify-mub", "--file", p(&file)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL") && text.contains("worst pair"), "{text}");

    std::fs::write(&file, "{\"d\": 3}").unwrap();
    assert_eq!(code(&run(&["verify-mub", "--file", p(&file)])), 2);
}

#[test]
fn reproduce_cases() {
    let d4 = run(&["reproduce", "--case", "d4"]);
    assert_eq!(code(&d4), 0);
    assert!(stdout(&d4).contains("0.814222") && stdout(&d4).contains("PASS"));
    let d3 = run(&["reproduce", "--case", "d3"]);
    assert_eq!(code(&d3), 0);
    assert!(stdout(&d3).contains("0.788675"));
    let all = run(&["reproduce", "--format", "json"]);
    assert_eq!(code(&all), 0);
    let v = json_stdout(&all);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v.as_array().unwrap().iter().all(|c| c["pass"] == json!(true)));
    // An impossible tolerance turns the d3 decimal match into a failure.
    assert_eq!(code(&run(&["reproduce", "--case", "d3", "--tol", "1e-9"])), 1);
}

#[test]
fn eval_round_trip_and_dominance() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d4.json");
    assert_eq!(code(&run(&["reproduce", "--case", "d4", "--out", p(&file)])), 0);
    let report = json_stdout(&run(&["eval", p(&file)]));
    let total = report["total"].as_f64().unwrap();
    assert!((total - (6493.0 + 1065.0 * 3f64.sqrt()) / 10240.0).abs() < 1e-9);

    // Explicit constant decision "always guess j = 1" versus --optimal.
    let mut strategy: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    strategy["decision"] = json!(vec![vec![1; 5]; 4]);
    std::fs::write(&file, strategy.to_string()).unwrap();
    let given = json_stdout(&run(&["eval", p(&file)]))["total"].as_f64().unwrap();
    let optimal = json_stdout(&run(&["eval", p(&file), "--optimal"]))["total"].as_f64().unwrap();
    assert!(given < optimal);
    assert!((optimal - total).abs() < 1e-15);
}

#[test]
fn eval_mixed_state_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mixed.json");
    let third = 1.0 / 3.0;
    let z = [0.0, 0.0];
    let e = [third, 0.0];
    let strategy = json!({
        "d": 3,
        "rho": {"matrix": [[e, z, z], [z, e, z], [z, z, e]]},
        "chi": [[[1.0, 0.0], z, z], [z, [1.0, 0.0], z], [z, z, [1.0, 0.0]]],
        "mub": "builtin",
    });
    std::fs::write(&file, strategy.to_string()).unwrap();
    let out = run(&["eval", p(&file)]);
    assert_eq!(code(&out), 0);
    let total = json_stdout(&out)["total"].as_f64().unwrap();
    assert!((third - 1e-12..=1.0 + 1e-12).contains(&total), "{total}");

    let mut bad = strategy.clone();
    bad["chi"][0][0] = json!([2.0, 0.0]);
    std::fs::write(&file, bad.to_string()).unwrap();
    let out = run(&["eval", p(&file)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("chi"));
}

#[test]
fn scan_is_deterministic_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "scan".to_string(), "--d".into(), "3".into(), "--trials".into(), "300".into(),
            "--seed".into(), "42".into(), "--input".into(), "fixture:d3".into(),
            "--out".into(), p(out).to_string(),
        ]
    };
    let run_owned = |v: Vec<String>| run(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run_owned(args(&a))), 0);
    let mut serial = args(&b);
    serial.push("--serial".into());
    assert_eq!(code(&run_owned(serial)), 0);
    let csv_a = std::fs::read(&a).unwrap();
    assert_eq!(csv_a, std::fs::read(&b).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("trial,seed,probability,exceeds\n"));
    assert_eq!(text.lines().count(), 301);
    assert!(!text.contains('\r'));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["trials"], json!(300));
    assert_eq!(summary["distribution"], json!("haar"));
}

#[test]
fn scan_d4_probabilities_are_bounded() {
    let out = run(&["scan", "--d", "4", "--trials", "1000", "--seed", "7", "--input", "fixture:d4", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert!(v["max"].as_f64().unwrap() <= 1.0);
    assert!(v["exceed_count"].as_u64().unwrap() > 0);
}

#[test]
fn lemma_on_vector_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("v.json");
    let h = 0.5;
    // One vector from each non-standard d = 4 basis: all entries of modulus 1/2.
    let mubs = json_stdout(&run(&["verify-mub", "--d", "4", "--format", "json"]));
    assert_eq!(mubs["pass"], json!(true));
    let family_file = dir.path().join("m.json");
    run(&["verify-mub", "--d", "4", "--out", p(&family_file)]);
    let family: Value = serde_json::from_str(&std::fs::read_to_string(&family_file).unwrap()).unwrap();
    let vectors: Vec<Value> = (1..=4).map(|mu| family["bases"][mu][0].clone()).collect();
    std::fs::write(&file, json!({"d": 4, "vectors": vectors}).to_string()).unwrap();
    let v = json_stdout(&run(&["lemma", p(&file), "--format", "json"]));
    assert!((v["lemma_bound"].as_f64().unwrap() - 2.5).abs() < 1e-9);
    assert_eq!(v["pass"], json!(true));

    let z = [0.0, 0.0];
    let one = [1.0, 0.0];
    std::fs::write(&file, json!({"d": 2, "vectors": [[one, z], [z, one]]}).to_string()).unwrap();
    let v = json_stdout(&run(&["lemma", p(&file), "--format", "json"]));
    assert!((v["lemma_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["operator_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let five: Vec<Value> = (0..5)
        .map(|i| {
            let t = i as f64;
            json!([[t.cos() * h, t.sin() * h], [h, 0.0], [(2.0 * t).sin() * h, (2.0 * t).cos() * h], [0.0, h]])
        })
        .collect();
    std::fs::write(&file, json!({"d": 4, "vectors": five}).to_string()).unwrap();
    let out = run(&["lemma", p(&file)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("PASS"));

    std::fs::write(&file, "not json").unwrap();
    assert_eq!(code(&run(&["lemma", p(&file)])), 2);
}
