use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn error_record(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error record on stderr")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn construct_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    for (family, flag, value) in [
        ("fn2", "--n", "5"),
        ("fn1", "--n", "6"),
        ("full-tree", "--k", "3"),
        ("parity-complete", "--k", "2"),
        ("separable", "--n", "6"),
    ] {
        let tree = path(&dir, "t.json");
        let anf = path(&dir, "f.anf");
        let out = qsep(&[
            "construct",
            family,
            flag,
            value,
            "--tree-out",
            &tree,
            "--anf-out",
            &anf,
        ]);
        assert!(out.status.success(), "{family}");
        let v = json(&out);
        // the written ANF reparses to the emitted table
        let analyzed = json(&qsep(&[
            "analyze",
            &anf,
            "--max-n",
            "0",
            "--max-parity-n",
            "0",
        ]));
        assert_eq!(analyzed["anf"], v["anf"]);
        let n = v["n"].as_u64().unwrap() as usize;
        let table = format!("n={n}\n{}\n", v["table"].as_str().unwrap());
        let tt = write(&dir, "f.tt", &table);
        let sim = json(&qsep(&["qsim", "--tree", &tree, "--fn", &tt, "--summary"]));
        assert_eq!(sim["pass"], true, "{family}");
        assert!(!Path::new(&format!("{tree}.tmp")).exists());
    }
}

#[test]
fn analyze_f3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f3.anf", "x1*x2 + x1*x3 + x2\n");
    let v = json(&qsep(&["analyze", &f]));
    assert_eq!(v["D"], 2);
    assert_eq!(v["parityDepth"], 2);
    assert_eq!(v["qeBounds"]["lo"], 2);
    assert_eq!(v["qeBounds"]["hi"], 2);
    assert_eq!(v["degree"], 2);
    assert_eq!(v["realDegree"], 2);
    assert_eq!(v["qfClassification"]["separability"], "NON_SEPARABLE");
    let pretty = qsep(&["--pretty", "analyze", &f]);
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("D  "));
}

#[test]
fn depth_commands() {
    let dir = TempDir::new().unwrap();
    let f5 = write(&dir, "f5.anf", "x1*x2 + x1*x3 + x1*x4 + x1*x5 + x2 + x3");
    let v = json(&qsep(&["optimal-depth", &f5, "--tree"]));
    assert_eq!(v["depth"], 3);
    assert!(v["tree"].is_object());
    let v = json(&qsep(&["parity-depth", &f5]));
    assert_eq!(v["parityDepth"], 2);
}

#[test]
fn caps_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "big.anf", "x1*x2*x3*x4*x5*x6*x7");
    let out = qsep(&["optimal-depth", &f]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"]["kind"], "cap_exceeded");
    let out = qsep(&["optimal-depth", &f, "--max-n", "7"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["depth"], 7);
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let out = qsep(&["construct"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["kind"], "usage");
    let out = qsep(&["construct", "fn2", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.anf", "x1 +\n x2 ** x3");
    let out = qsep(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"]["kind"], "parse");
    assert!(rec["error"]["message"].as_str().unwrap().contains("line 2"));
    let out = qsep(&["analyze", &path(&dir, "missing")]);
    assert_eq!(error_record(&out)["error"]["kind"], "io");
    let out = Command::new(env!("CARGO_BIN_EXE_qsep"))
        .args(["construct", "fn2", "--n", "5"])
        .env("QSEP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qsim_failure_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let tree = write(
        &dir,
        "t.json",
        r#"{"q":{"kind":"parity","i":1,"j":2},"0":{"leaf":0},"1":{"leaf":1}}"#,
    );
    let and = write(&dir, "and.anf", "x1*x2");
    let out = qsep(&["qsim", "--tree", &tree, "--fn", &and]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["mismatches"], 3);
    let xor = write(&dir, "xor.tt", "n=2\n6\n");
    let v = json(&qsep(&["qsim", "--tree", &tree, "--fn", &xor]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["maxQueries"], 1);
    assert_eq!(v["transcript"].as_array().unwrap().len(), 4);
}

#[test]
fn reduce_both_ways() {
    let dir = TempDir::new().unwrap();
    let f3 = write(&dir, "f3.anf", "x1*x2 + x1*x3 + x2");
    let v = json(&qsep(&["reduce", &f3, "--k", "2"]));
    assert_eq!(v["found"], true);
    assert_eq!(v["certificate"]["restriction"][0]["var"], 2);
    let v = json(&qsep(&["reduce", &f3, "--k", "3"]));
    assert_eq!(v["found"], false);
    let tree = write(
        &dir,
        "t.json",
        r#"{"q":{"kind":"var","i":1},"0":{"q":{"kind":"var","i":2},"0":{"leaf":0},"1":{"leaf":1}},"1":{"q":{"kind":"var","i":3},"0":{"leaf":0},"1":{"leaf":1}}}"#,
    );
    let v = json(&qsep(&["reduce", &f3, "--tree", &tree]));
    assert_eq!(v["verified"], true);
    assert_eq!(v["certificate"]["k"], 2);
}

#[test]
fn mm_is_deterministic_and_reads_specs() {
    let a = qsep(&["mm", "--n", "6", "--seed", "11"]);
    let b = qsep(&["mm", "--n", "6", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["bent"], true);
    assert_eq!(v["nonlinearity"], 28);
    assert!(v["parityDepth"].as_u64().unwrap() <= 5);
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", &v["spec"].to_string());
    let again = json(&qsep(&["mm", "--spec", &spec]));
    assert_eq!(again["table"], v["table"]);
    let bad = write(&dir, "bad.json", r#"{"n":4,"phi":[0,0,1,2],"h":"0"}"#);
    assert_eq!(qsep(&["mm", "--spec", &bad]).status.code(), Some(2));
}

#[test]
fn selector_construction() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.anf", "x1");
    let h = write(&dir, "h.anf", "x1");
    let v = json(&qsep(&["construct", "selector", "--g", &g, "--h", &h]));
    assert_eq!(v["anf"], "x1*x3 + x2*x3 + x2");
}

#[test]
fn verify_paper_subset() {
    let out = qsep(&["verify-paper", "--suite", "1,8"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(
        qsep(&["verify-paper", "--suite", "12"]).status.code(),
        Some(2)
    );
}

#[test]
fn open_problem_exploration_reports_without_claims() {
    let v = json(&qsep(&["verify-paper", "--suite", "1", "--explore-open"]));
    let findings = v["openProblems"].as_array().unwrap();
    assert_eq!(findings.len(), 3);
    assert!(findings[0]["finding"]
        .as_str()
        .unwrap()
        .contains("not decided"));
}
