use std::path::PathBuf;
use std::process::{Command, Output};

fn qpuiseux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpuiseux"))
        .args(args)
        .env_remove("QPUISEUX_MAX_BRANCHES")
        .output()
        .expect("run binary")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qpuiseux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_json_has_one_branch() {
    let o = qpuiseux(&["solve", "y(q*x)-y-x", "--trunc", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b = &v["branches"];
    assert_eq!(b.as_array().unwrap().len(), 1);
    assert_eq!(b[0]["series"]["terms"][0][1], "1/(q - 1)");
    assert_eq!(b[0]["status"], "exact-zero");
}

#[test]
fn equation_may_start_with_minus() {
    let o = qpuiseux(&["solve", "-x + y", "--trunc", "2", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("y = x"));
}

#[test]
fn polygon_lists_the_edge() {
    let csv = tmp("cloud.csv");
    let o = qpuiseux(&["polygon", "y*y(q*x)-x", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("co-slope 1/2"));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("alpha,height,on_hull\n"));
}

#[test]
fn check_exact_and_failing_solutions() {
    let good = tmp("good.txt");
    std::fs::write(&good, "x").unwrap();
    let o = qpuiseux(&["check", "y-x", "--solution", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("residual valuation inf"));

    let bad = tmp("bad.txt");
    std::fs::write(&bad, "2*x").unwrap();
    let o = qpuiseux(&["check", "y-x", "--solution", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_accepts_solve_output() {
    let o = qpuiseux(&["solve", "y - x*y(q*x) - x", "--trunc", "8"]);
    let path = tmp("solution.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = qpuiseux(&[
        "check",
        "y - x*y(q*x) - x",
        "--solution",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ok: residual valuation >8"));
}

#[test]
fn gevrey_report_and_csv() {
    let csv = tmp("gevrey.csv");
    let o = qpuiseux(&[
        "gevrey",
        "y - x*y(q*x) - x",
        "--window",
        "50:200",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s: f64 = v["branches"][0]["report"]["s_emp"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.95..=1.0).contains(&s));
    assert_eq!(v["branches"][0]["report"]["dominated"], true);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("m,log_abs_coeff,pointwise_s_m\n"));
    assert_eq!(text.lines().count(), 152);
}

#[test]
fn numeric_mode_and_text_format() {
    let o = qpuiseux(&[
        "solve",
        "y*y(q*x)-x",
        "--mode",
        "numeric",
        "--q",
        "2",
        "--format",
        "text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("[1]") && out.contains("[2]"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(qpuiseux(&["solve", "y^(1/2)"]).status.code(), Some(1));
    assert_eq!(qpuiseux(&["solve"]).status.code(), Some(1));
    assert_eq!(
        qpuiseux(&["gevrey", "y", "--window", "9:1"]).status.code(),
        Some(1)
    );
    let o = qpuiseux(&["solve", "y*y(q*x)-x", "--max-branches", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qpuiseux"))
        .args(["solve", "y*y(q*x)-x"])
        .env("QPUISEUX_MAX_BRANCHES", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn equation_from_file() {
    let path = tmp("eq.txt");
    std::fs::write(&path, "y(q^2*x) - y\n  - x^2\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = qpuiseux(&["solve", &arg, "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(1/(q^4 - 1))*x^2"));
}
