//! Acceptance suite: one line per criterion, then a hard failure if any
//! criterion failed. Run with `cargo test -p qsep --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::Instant;

use qsep::verify::{criteria, run_criterion};
use qsep_core::boolfun::parse_function;
use qsep_core::ptrees::ParityDecisionTree;
use qsep_core::trees::DepthSearch;

fn binary_worked_example() -> Result<String, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qsep"))
        .args(["construct", "fn2", "--n", "5"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let anf = v["anf"].as_str().ok_or("no anf field")?;
    if anf != "x1*x2 + x1*x3 + x1*x4 + x1*x5 + x2 + x3" {
        return Err(format!("ANF {anf}"));
    }
    let tree = ParityDecisionTree::from_json(&v["tree"].to_string()).map_err(|e| e.to_string())?;
    let f = parse_function(anf).map_err(|e| e.to_string())?;
    if tree.function(5).map_err(|e| e.to_string())? != f || tree.depth() != 2 {
        return Err("emitted tree does not compute the emitted ANF at depth 2".into());
    }
    let d = DepthSearch::new(5).depth(&f).map_err(|e| e.to_string())?;
    if d != 3 {
        return Err(format!("D = {d}"));
    }
    Ok(format!(
        "binary output verified in {} ms",
        start.elapsed().as_millis()
    ))
}

#[test]
fn acceptance() {
    let mut failed = vec![];
    match binary_worked_example() {
        Ok(d) => println!("PASS  1b `qsep construct fn2 --n 5`: {d}"),
        Err(e) => {
            println!("FAIL  1b `qsep construct fn2 --n 5`: {e}");
            failed.push("1b".to_string());
        }
    }
    for c in criteria() {
        let r = run_criterion(&c);
        println!(
            "{}  {} {} [{} ms / limit {} ms]: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.elapsed_ms,
            r.limit_ms,
            r.detail
        );
        if !r.pass {
            failed.push(r.id.to_string());
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
