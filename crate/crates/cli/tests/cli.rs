use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermocap"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn fixtures() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "pointmass4.json", r#"{"probs":[1,0,0,0]}"#);
    write(d.path(), "uniform4.json", r#"{"probs":[0.25,0.25,0.25,0.25]}"#);
    write(d.path(), "identity4.json", r#"{"matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"dim_in":4,"dim_out":4}"#);
    write(d.path(), "bsc01.json", r#"{"matrix":[[0.9,0.1],[0.1,0.9]],"dim_in":2,"dim_out":2}"#);
    write(d.path(), "biased.json", r#"{"probs":[0.7,0.3]}"#);
    write(d.path(), "fair.json", r#"{"probs":[0.5,0.5]}"#);
    write(d.path(), "flat2.json", r#"{"levels":[0,0],"units":"kT"}"#);
    write(d.path(), "phi2.json", r#"{"probs":[[0.5,0],[0,0.5]]}"#);
    d
}

fn run(dir: &TempDir, args: &[&str]) -> Output {
    bin().current_dir(dir.path()).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn point_mass_against_uniform() {
    let d = fixtures();
    let out = run(&d, &["entropy", "d0", "--p", "pointmass4.json", "--q", "uniform4.json", "--eps", "0.1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["bits"], 2.0);
    assert_eq!(v["witness"], serde_json::json!([0]));
    assert_eq!(v["seed"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["eps"], 0.1);
    assert_eq!(v["inputs"]["p"]["value"]["probs"][0], 1.0);
}

#[test]
fn identity_capacity() {
    let d = fixtures();
    let v = json(&run(&d, &["capacity", "--channel", "identity4.json", "--eps", "0"]));
    assert_eq!(v["bits"], 2.0);
    assert_eq!(v["messages"], 4);
}

#[test]
fn capacity_bounds_on_bsc() {
    let d = fixtures();
    let out = run(&d, &["bounds", "capacity", "--channel", "bsc01.json", "--eps", "0.15", "--omega", "0.075", "--delta", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["capacity"], 1.0);
    assert_eq!(v["lower_estimate_kind"], "search");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let d = fixtures();
    let args = ["landauer", "--channel", "identity4.json", "--eps", "0.01", "--trials", "20000", "--seed", "5"];
    let (a, b) = (run(&d, &args), run(&d, &args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let seq = run(&d, &[&args[..], &["--exec", "sequential"]].concat());
    let (mut x, mut y) = (json(&a), json(&seq));
    assert_eq!(x["seed"], 5);
    x.as_object_mut().unwrap().remove("exec");
    y.as_object_mut().unwrap().remove("exec");
    assert_eq!(x, y);
}

#[test]
fn report_written_to_file() {
    let d = fixtures();
    let target = d.path().join("report.csv");
    let out = run(&d, &["entropy", "rel", "--p", "biased.json", "--q", "fair.json", "--format", "csv", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l.starts_with("bits,0.118")));
}

#[test]
fn stein_series_as_csv() {
    let d = fixtures();
    let out = run(&d, &["asymptotics", "stein", "--p", "biased.json", "--q", "fair.json", "--eps", "0.01", "--n-max", "200", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,value,target"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn work_commands() {
    let d = fixtures();
    let v = json(&run(&d, &["wcorr", "--joint", "phi2.json", "--eps", "0.05", "--ksteps", "100"]));
    let w = v["work"]["value"].as_f64().unwrap();
    assert!((w - std::f64::consts::LN_2).abs() < 0.1, "{w}");
    assert_eq!(v["config"]["budget"]["k_steps"], 100);
    let v = json(&run(&d, &["workext", "--state", "biased.json", "--hamiltonian", "flat2.json", "--eps", "0.05", "--temperature", "2"]));
    let value = v["value"].as_f64().unwrap();
    assert_eq!(v["at_temperature"]["values"]["value"].as_f64().unwrap(), 2.0 * value);
}

#[test]
fn usage_and_input_errors_exit_one() {
    let d = fixtures();
    assert_eq!(run(&d, &["entropy", "d0", "--p", "missing.json", "--q", "uniform4.json", "--eps", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&d, &["capacity", "--eps", "0"]).status.code(), Some(1));
    assert_eq!(run(&d, &["entropy", "d0", "--p", "pointmass4.json", "--q", "fair.json", "--eps", "0.1"]).status.code(), Some(1));
    write(d.path(), "bad.json", r#"{"probs":[0.5,0.6]}"#);
    let out = run(&d, &["entropy", "rel", "--p", "bad.json", "--q", "fair.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&d, &["--help"]).status.code(), Some(0));
}

#[test]
fn thread_count_from_environment() {
    let d = fixtures();
    let args = ["capacity", "--channel", "bsc01.json", "--eps", "0.15"];
    let one = bin().current_dir(d.path()).env("THERMOCAP_THREADS", "1").args(args).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, run(&d, &args).stdout);
    let bad = bin().current_dir(d.path()).env("THERMOCAP_THREADS", "many").args(args).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
