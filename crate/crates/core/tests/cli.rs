use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
        .display()
        .to_string()
}

fn cashsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cashsub"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn every_shipped_spec_gets_the_expected_exit_code() {
    for (name, want) in [
        ("worst_case.json", 0),
        ("neg_expectation.json", 0),
        ("entropic.json", 0),
        ("discounted.json", 0),
        ("loss_based.json", 0),
        ("scaled_worst_case.json", 1),
    ] {
        let o = cashsub(&["check", "--spec", &spec(name), "--trials", "1000"]);
        assert_eq!(
            code(&o),
            want,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let r = stdout_json(&o);
        assert_eq!(r["status"], if want == 0 { "pass" } else { "fail" });
    }
}

#[test]
fn report_fields_are_ordered() {
    let o = cashsub(&["check", "--spec", &spec("entropic.json"), "--trials", "100"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let keys: Vec<usize> = [
        "\"tool\"",
        "\"version\"",
        "\"command\"",
        "\"generated_at\"",
        "\"seed\"",
        "\"config\"",
        "\"status\"",
        "\"results\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap_or_else(|| panic!("{k} missing")))
    .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
}

#[test]
fn unclaimed_failures_do_not_fail_the_run() {
    let o = cashsub(&[
        "check",
        "--spec",
        &spec("discounted.json"),
        "--trials",
        "1000",
    ]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    let a1 = r["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["axiom"] == "A1")
        .unwrap();
    assert_eq!(a1["verdict"], "fail");
    assert_eq!(a1["claimed"], false);
    assert!(a1["counterexample"]["inputs"].is_array());
}

#[test]
fn usage_and_format_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let good = write(d, "good.csv", "s1,s2\n1,2\n").display().to_string();
    let header = write(d, "header.csv", "a,b\n1,2\n").display().to_string();
    let text = write(d, "text.csv", "s1,s2\n1,x\n").display().to_string();
    let three = write(d, "three.csv", "s1,s2,s3\n1,2,3\n")
        .display()
        .to_string();
    let bad_spec = write(
        d,
        "bad.json",
        r#"{"kind": "entropic", "params": {"beta": 0, "weights": [1]}}"#,
    )
    .display()
    .to_string();
    let (ent, wc) = (spec("entropic.json"), spec("worst_case.json"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "--spec", &ent],
        vec!["eval", "--data", &good],
        vec!["eval", "--spec", &ent, "--data", &header],
        vec!["eval", "--spec", &ent, "--data", &text],
        vec!["eval", "--spec", &ent, "--data", &three],
        vec!["eval", "--spec", &bad_spec, "--data", &good],
        vec!["eval", "--spec", "/nonexistent.json", "--data", &good],
        vec!["check", "--spec", &ent, "--trials", "0"],
        vec!["check", "--spec", &ent, "--grid-step", "0.3"],
        vec!["penalty", "--spec", &wc, "--grid-step", "0.3"],
        vec!["frobnicate"],
        vec!["check", "--mode", "other"],
    ];
    for args in cases {
        let o = cashsub(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn eval_matches_the_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "x.csv", "s1,s2\n1,2\n-1,3\n")
        .display()
        .to_string();
    let o = cashsub(&["eval", "--spec", &spec("worst_case.json"), "--data", &data]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    let values: Vec<f64> = r["results"]["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(values, vec![-1.0, 1.0]);
}

#[test]
fn reconstruct_writes_and_reuses_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "p.csv", "s1,s2\n1,2\n-1,3\n0.5,-2\n")
        .display()
        .to_string();
    let out = dir.path().join("r.json");
    let o = cashsub(&[
        "reconstruct",
        "--spec",
        &spec("neg_expectation.json"),
        "--data",
        &data,
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let computed: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let table = dir.path().join("r.penalty.csv");
    assert_eq!(
        computed["results"]["table_path"],
        table.display().to_string()
    );
    let csv = std::fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("p1,p2,value,boundary_flag,mode\n"));
    assert_eq!(csv.lines().count(), 1 + 231);

    let o = cashsub(&[
        "reconstruct",
        "--spec",
        &spec("neg_expectation.json"),
        "--data",
        &data,
        "--table",
        &table.display().to_string(),
    ]);
    assert_eq!(code(&o), 0);
    let imported = stdout_json(&o);
    assert_eq!(imported["results"]["surface_source"], "imported");
    assert_eq!(imported["results"]["probes"], computed["results"]["probes"]);
}

#[test]
fn reconstruct_flags_a_coarse_surface() {
    // one lattice step misses the entropic maximizer by more than step * |X|_1
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "p.csv", "s1,s2\n0.1,-0.1\n")
        .display()
        .to_string();
    let o = cashsub(&[
        "reconstruct",
        "--spec",
        &spec("entropic.json"),
        "--data",
        &data,
        "--grid-step",
        "1",
    ]);
    let r = stdout_json(&o);
    let probe = &r["results"]["probes"][0];
    let (gap, bound) = (
        probe["gap"].as_f64().unwrap(),
        probe["bound"].as_f64().unwrap(),
    );
    assert_eq!(code(&o), if gap <= bound { 0 } else { 1 });
}

#[test]
fn lift_check_and_penalty() {
    let o = cashsub(&[
        "lift-check",
        "--spec",
        &spec("scaled_worst_case.json"),
        "--trials",
        "1000",
    ]);
    assert_eq!(code(&o), 1);
    let o = cashsub(&[
        "lift-check",
        "--spec",
        &spec("loss_based.json"),
        "--trials",
        "1000",
    ]);
    assert_eq!(code(&o), 0);

    let o = cashsub(&[
        "penalty",
        "--spec",
        &spec("worst_case.json"),
        "--dim",
        "3",
        "--grid-step",
        "0.5",
    ]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["results"]["dimension"], 3);
    assert_eq!(r["results"]["grid_points"], 10);
    assert_eq!(r["results"]["mode"], "paper-formula");
}

#[test]
fn seed_changes_the_trials() {
    let run = |seed: &str| {
        let o = cashsub(&[
            "check",
            "--spec",
            &spec("scaled_worst_case.json"),
            "--trials",
            "500",
            "--seed",
            seed,
        ]);
        let mut r = stdout_json(&o);
        r["generated_at"] = Value::Null;
        r
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3")["results"], run("4")["results"]);
}
