use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scp"))
        .args(args)
        .env_remove("SCP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

const SQUARE: &str = "scp 1
n 4
edge 1 2 1
edge 2 3 1
edge 3 4 1
edge 4 1 1
request 1 2 1
request 3 4 1
";

#[test]
fn solve_json_is_byte_identical_across_runs() {
    let file = scratch("square.scp", SQUARE);
    let a = scp(&["solve", file.to_str().unwrap(), "--json"]);
    let b = scp(&["solve", file.to_str().unwrap(), "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["cost"], 4);
    assert_eq!(v["candidates_evaluated"], 3);
    assert_eq!(v["timings_ms"], serde_json::Value::Null);
}

#[test]
fn generated_instance_solves_and_checks() {
    let gen = scp(&["gen", "--seed", "17"]);
    assert!(gen.status.success());
    let file = scratch("gen17.scp", &stdout(&gen));
    let solved = scp(&["solve", file.to_str().unwrap(), "--json", "--timings"]);
    assert!(solved.status.success());
    let report = scratch("gen17.json", &stdout(&solved));
    let check = scp(&["check", file.to_str().unwrap(), report.to_str().unwrap()]);
    assert!(check.status.success(), "{}", stdout(&check));
    let oracle = scp(&["oracle", file.to_str().unwrap()]);
    assert!(stdout(&oracle).ends_with("match\n"));
    assert_eq!(oracle.status.code(), Some(0));
}

#[test]
fn seed_comes_from_environment() {
    let flag = scp(&["gen", "--seed", "99"]);
    let env = Command::new(env!("CARGO_BIN_EXE_scp"))
        .arg("gen")
        .env("SCP_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, scp(&["gen", "--seed", "98"]).stdout);
}

#[test]
fn tampered_report_fails_check() {
    let file = scratch("square2.scp", SQUARE);
    let solved = scp(&["solve", file.to_str().unwrap(), "--json"]);
    let mut v: serde_json::Value = serde_json::from_slice(&solved.stdout).unwrap();
    v["steps"].as_array_mut().unwrap().pop();
    let report = scratch("square2.json", &v.to_string());
    let check = scp(&["check", file.to_str().unwrap(), report.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
    assert!(stdout(&check).starts_with("invalid"));
}

#[test]
fn malformed_input_exits_with_two() {
    for (name, text, code) in [
        ("dangling.scp", "scp 1\nn 2\nedge 0 1 3\n", "dangling-endpoint"),
        ("negative.scp", "scp 1\nn 2\nedge 1 2 -3\n", "negative-cost"),
        ("directive.scp", "scp 1\nn 2\nvertex 1\n", "unknown-directive"),
        ("split.scp", "scp 1\nn 3\nedge 1 2 3\n", "disconnected"),
    ] {
        let file = scratch(name, text);
        let out = scp(&["solve", file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(code), "{name}");
    }
    let missing = scp(&["solve", "/nonexistent/file.scp"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn accept_and_bench_run() {
    let accept = scp(&["accept", "--seed", "3", "--count", "10"]);
    assert!(accept.status.success(), "{}", stdout(&accept));
    assert_eq!(stdout(&accept).matches("PASS").count(), 7);
    let bench = scp(&["bench", "--family", "grid-aisle", "--sizes", "6,8", "--requests", "3"]);
    assert!(bench.status.success());
    assert_eq!(stdout(&bench).lines().count(), 3);
}
