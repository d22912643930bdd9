use std::path::PathBuf;
use std::process::{Command, Output};

fn painleve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_painleve")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("json output")
}

fn benchmark(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(name)
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = painleve(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(painleve(&["--help"]).status.code(), Some(0));
    assert_eq!(painleve(&["--version"]).status.code(), Some(0));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(painleve(&["show", "p7"]).status.code(), Some(2));
    assert_eq!(painleve(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(painleve(&["verify", "--suite", "coxeter", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(painleve(&["apply", "d4", "s9"]).status.code(), Some(2));
    assert_eq!(painleve(&["integrate", "/nonexistent/benchmark.json"]).status.code(), Some(2));
    assert_eq!(painleve(&["search-integrals", "d4", "--deg", "1", "--twin", "1"]).status.code(), Some(2));
}

#[test]
fn exact_d4_coxeter_suite_reports_every_relation() {
    let out = painleve(&["verify", "--suite", "coxeter", "--family", "d4", "--mode", "exact", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["config"]["mode"], "exact");
    let checks = report["checks"].as_array().unwrap();
    let relations = checks.iter().filter(|c| c["check"].as_str().unwrap().starts_with("coxeter/d4/")).count();
    assert_eq!(relations, 15);
    assert!(checks.iter().all(|c| c["status"] == "pass" && c["mode"] == "exact"));
    let names: Vec<&str> = checks.iter().map(|c| c["check"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn report_can_be_written_to_a_file() {
    let dir = std::env::temp_dir().join(format!("painleve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_painleve"))
        .args(["verify", "--suite", "translations", "--format", "json", "--output", path.to_str().unwrap()])
        .env("PAINLEVE_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn human_format_ends_with_totals() {
    let out = painleve(&["degenerate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().last().unwrap().contains("6 pass, 0 fail"));
}

#[test]
fn list_names_every_family_and_suite() {
    let text = stdout(&painleve(&["list"]));
    for needle in ["d4", "b4a", "b4b", "d52", "d51", "pi4", "varphi", "p3-to-p3t", "integrals"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn show_exports_the_field() {
    let out = painleve(&["show", "d51", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value = json(&out);
    assert_eq!(value["field"].as_object().unwrap().len(), 4);
}

#[test]
fn apply_composes_words() {
    let identity = json(&painleve(&["apply", "d4", "s1,s1"]));
    assert!(identity["images"].as_object().unwrap().is_empty());
    let out = painleve(&["apply", "d4", "s1", "--point", "x=1,y=2,z=0,w=0,t=1,alpha1=1/2,alpha2=0,alpha3=0,alpha4=0"]);
    assert_eq!(out.status.code(), Some(0));
    let image = json(&out)["image"].clone();
    assert_eq!(image["x"], "5/4");
    assert_eq!(image["alpha1"], "-1/2");
    assert_eq!(image["alpha0"], "1/2");
}

#[test]
fn apply_reports_undefined_points() {
    let out = painleve(&["apply", "d4", "s1", "--point", "x=1,y=0,z=0,w=0,t=1,alpha1=1/2,alpha2=0,alpha3=0,alpha4=0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn integrate_writes_json_lines() {
    let path = std::env::temp_dir().join(format!("painleve-traj-{}.jsonl", std::process::id()));
    let bench = benchmark("d4.json");
    let out = painleve(&["integrate", bench.to_str().unwrap(), "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&out);
    assert_eq!(summary["samples"], 33);
    assert!(summary["max_defect"].as_f64().unwrap() < 1e-8);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.lines().count(), 33);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn search_integrals_accepts_negative_windows() {
    let out = painleve(&["search-integrals", "d4", "--deg", "2", "--twin", "-2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let value = json(&out);
    assert_eq!(value["verdict"], "constants only");
    assert_eq!(value["basis"], serde_json::json!(["1"]));
}

#[test]
fn probe_reports_without_failing() {
    let out = painleve(&["probe-assumption-a", "d4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out).as_array().unwrap().iter().any(|r| r["status"] == "fail"));
}
