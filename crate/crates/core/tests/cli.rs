use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn model(name: &str) -> String {
    format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-tba")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("robust-tba-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn check_exit_codes() {
    let fig3 = run(&["check", &model("fig3.ta")]);
    assert_eq!(fig3.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&fig3)).unwrap();
    assert_eq!(v["controllable"], true);
    assert!(v["extensions"]["initial_constraint"].is_string());
    let cycle: Vec<&str> = v["witness"]["cycle"].as_array().unwrap().iter().map(|s| s["to"].as_str().unwrap()).collect();
    assert_eq!(cycle.len(), 3);
    assert_eq!(run(&["check", &model("fig4.ta")]).status.code(), Some(1));
    assert_eq!(run(&["check", &model("fig1.ta")]).status.code(), Some(1));
}

#[test]
fn fog_of_the_two_step_cycle() {
    let o = run(&["fog", &model("fig1.ta"), "--anchor", "l1: y=0 && 0<x<1", "--cycle", "l1,l2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let fog = out.split("digraph orbit").next().unwrap();
    assert!(fog.contains("doomed(1)"));
    let mut edges: Vec<&str> = fog.lines().map(str::trim).filter(|l| l.contains("->")).collect();
    edges.sort();
    assert_eq!(edges, ["c0 -> c0;", "c0 -> c1;", "c1 -> c1;"]);
    assert!(out.contains("digraph orbit"));
}

#[test]
fn fog_json() {
    let o = run(&["fog", &model("fig3.ta"), "--anchor", "l0: 0<x && x-y<0 && y<1", "--cycle", "l0,l1,l2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.to_string().contains("cluster(1)"), "{v}");
}

#[test]
fn outputs_are_reproducible() {
    for args in [
        vec!["check", &model("fig3.ta")][..].to_vec(),
        vec!["regions", &model("fig1.ta")],
        vec!["simulate", &model("fig3.ta"), "--perturbator", "random", "--seed", "9", "--max-steps", "60"],
        vec!["simulate", &model("fig4.ta"), "--controller", "random", "--cycle", "l0,l1,l2", "--delta", "1/10", "--seed", "3"],
    ]
    .iter()
    .map(|a| a.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn threads_do_not_change_the_verdict() {
    let one = run(&["check", &model("fig3.ta")]);
    let four = run(&["check", &model("fig3.ta"), "--threads", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn validate_round_trip() {
    let verdict = stdout(&run(&["check", &model("fig3.ta")]));
    let good = tmp("verdict.json", &verdict);
    let o = run(&["validate", &model("fig3.ta"), good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let mut v: Value = serde_json::from_str(&verdict).unwrap();
    let bare = tmp("witness.json", &v["witness"].to_string());
    assert_eq!(run(&["validate", &model("fig3.ta"), bare.to_str().unwrap()]).status.code(), Some(0));

    v["witness"]["delta0"] = Value::from("1");
    let forged = tmp("forged.json", &v.to_string());
    let o = run(&["validate", &model("fig3.ta"), forged.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    // the fig3 lap does not exist in fig1
    assert_eq!(run(&["validate", &model("fig1.ta"), good.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn budget_exit() {
    let o = run(&["check", &model("fig3.ta"), "--budget", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn input_errors() {
    assert_eq!(run(&["check", "/nonexistent/model.ta"]).status.code(), Some(3));
    let bad = tmp("bad.ta", "clocks x\nbound 1\nedge l0 l1 \"x<<1\"\n");
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(run(&["check", &model("fig3.ta"), "--budget", "lots"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["simulate", &model("fig3.ta"), "--delta", "1"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_formats() {
    let o = run(&["simulate", &model("fig3.ta"), "--max-steps", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines.last().unwrap()["end"], "budget");

    let o = run(&["simulate", &model("fig4.ta"), "--controller", "late", "--cycle", "l0,l1,l2", "--delta", "1/10", "--format", "csv"]);
    let csv = stdout(&o);
    assert!(csv.starts_with("visit,step,lyapunov,lap_class,qualifying"));
    assert!(csv.contains("doomed(1)"));
}
