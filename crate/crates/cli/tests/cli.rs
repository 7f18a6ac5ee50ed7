use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn mixlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixlin")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_schema(v: &Value) {
    let obj = v.as_object().unwrap();
    for k in ["verdict", "disjunct", "modes", "prefix", "stats"] {
        assert!(obj.contains_key(k), "missing {k} in {v}");
    }
    for k in ["disjuncts", "mode_vectors_checked", "elapsed_ms"] {
        assert!(v["stats"][k].is_u64(), "stats.{k} in {v}");
    }
}

#[test]
fn decide_strict_increase() {
    let o = mixlin(&["decide", "--json", &example("strict_increase.rel")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_schema(&v);
    assert_eq!(v["verdict"], "has_omega_chain");
    let prefix = v["prefix"].as_array().unwrap();
    assert_eq!(prefix.len(), 5);
    let ys: Vec<i64> = prefix.iter().map(|a| a["y"].as_str().unwrap().parse().unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[1] > w[0]), "{ys:?}");
}

#[test]
fn witness_length_is_configurable() {
    let o = mixlin(&["decide", "--json", "--witness", "3", &example("dense_descent.rel")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["prefix"].as_array().unwrap().len(), 3);
    let o = mixlin(&["decide", "--json", "--witness", "0", &example("dense_descent.rel")]);
    assert!(json(&o)["prefix"].is_null());
}

#[test]
fn decide_without_chain() {
    let o = mixlin(&["decide", "--json", &example("bounded_descent.rel")]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_schema(&v);
    assert_eq!(v["verdict"], "no_omega_chain");
}

#[test]
fn transitivity() {
    let o = mixlin(&["transitive", "--json", &example("plus_one.rel")]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_schema(&v);
    let cx = v["counterexample"].as_array().unwrap();
    let y: Vec<i64> = cx.iter().map(|a| a["y"].as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(y[1], y[0] + 1);
    assert_eq!(y[2], y[1] + 1);
    assert_eq!(code(&mixlin(&["transitive", &example("mixed.rel")])), 0);
}

#[test]
fn non_transitive_decide_is_a_precondition_failure() {
    let o = mixlin(&["decide", "--json", &example("plus_one.rel")]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "not_transitive");
    // trusting skips the check; the verdict itself is meaningless here
    let o = mixlin(&["decide", "--trust-transitive", &example("plus_one.rel")]);
    assert!(matches!(code(&o), 0 | 1));
}

#[test]
fn resource_limits() {
    let o = mixlin(&["decide", "--timeout", "0", &example("huge.rel")]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource limit"));
    let o = mixlin(&["decide", "--max-branches", "1", &example("mixed.rel")]);
    assert_eq!(code(&o), 4);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&mixlin(&["decide"])), 2);
    assert_eq!(code(&mixlin(&["frobnicate", "x"])), 2);
    assert_eq!(code(&mixlin(&["decide", "/nonexistent/file.rel"])), 2);
    assert_eq!(code(&mixlin(&["bound", "--uniform", &example("plateau.sys")])), 2);
    let dir = std::env::temp_dir().join(format!("mixlin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.rel");
    std::fs::write(&bad, "(relation (ints y) (body (> y' z)))").unwrap();
    let o = mixlin(&["decide", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("undeclared"));
}

#[test]
fn formula_documents() {
    let o = mixlin(&["sat", "--json", &example("formula.rel")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_schema(&v);
    assert!(v["model"]["x"].is_string());
    let o = mixlin(&["qe", &example("formula.rel")]);
    assert_eq!(code(&o), 0);
    assert!(!String::from_utf8_lossy(&o.stdout).contains("exists"));
    let o = mixlin(&["separate", "--json", &example("mixed.rel")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["stats"]["disjuncts"].as_u64().unwrap() as usize, v["canonical"].as_array().unwrap().len());
}

#[test]
fn system_queries() {
    let counter = example("counter.sys");
    let plateau = example("plateau.sys");
    assert_eq!(code(&mixlin(&["safety", &counter])), 1);
    assert_eq!(code(&mixlin(&["safety", &plateau])), 0);
    let o = mixlin(&["liveness", "--json", &counter]);
    assert_eq!(code(&o), 0);
    assert_schema(&json(&o));
    assert_eq!(code(&mixlin(&["eventuality", &counter, "--target", "(= y 7)"])), 0);
    assert_eq!(code(&mixlin(&["eventuality", &counter, "--target", "(< y 0)"])), 1);
    assert_eq!(code(&mixlin(&["bound", &counter])), 1);
    assert_eq!(code(&mixlin(&["bound", &plateau])), 0);
    assert_eq!(code(&mixlin(&["bound", "--reachable", &plateau])), 0);
    assert_eq!(code(&mixlin(&["bound", "--reachable", &counter])), 1);
}

#[test]
fn oracle() {
    let inc = example("strict_increase.rel");
    assert_eq!(code(&mixlin(&["oracle", &inc, "--box", "0:3"])), 1);
    assert_eq!(code(&mixlin(&["oracle", &inc, "--box", "0:3,1:2"])), 2);
    assert_eq!(code(&mixlin(&["oracle", &inc, "--box", "0:100", "--cap", "10"])), 4);
    assert_eq!(code(&mixlin(&["oracle", &example("dense_descent.rel"), "--box", "0:1"])), 2);
}
