use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_okounkov"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(sub)
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

const P2_BODY: &str = r#"{"seed": 0, "model": {"kind": "projective", "n": 2}, "k_max": 3}"#;

#[test]
fn body_of_p2_is_the_simplex() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", P2_BODY);
    let out = tmp.path().join("out");
    let o = run("body", &cfg, &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let body = read_json(&out.join("body.json"));
    assert_eq!(body["data"]["vertex_count"], 3);
    assert_eq!(body["data"]["volume"], "1/2");
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["pipeline"], "body");
    assert_eq!(manifest["seed"], 0);
    assert_eq!(manifest["status"], "pass");
    assert!(manifest["wall_time_seconds"].is_number());
    assert_eq!(body["config_sha256"], manifest["config_sha256"]);
}

#[test]
fn every_artifact_carries_the_config_hash() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "k_max": 6, "filtration": {"kind": "weight", "weights": ["1", "0"]}, "p_list": [1]}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run("transform", &cfg, &out, &[]).status.code(), Some(0));
    let manifest = read_json(&out.join("manifest.json"));
    let hash = manifest["config_sha256"].as_str().unwrap().to_string();
    let files = manifest["artifacts"].as_array().unwrap();
    assert!(files.len() >= 7);
    for f in files {
        let text = fs::read_to_string(out.join(f.as_str().unwrap())).unwrap();
        assert!(text.contains(&hash), "{f} lacks the config hash");
    }
}

#[test]
fn exact_pipelines_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "k_max": 8, "filtration": {"kind": "minima"}, "metric": {"kind": "fs_sup"}}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(run("transform", &cfg, d, &[]).status.code(), Some(0));
    }
    let files = read_json(&a.join("manifest.json"))["artifacts"].clone();
    for f in files.as_array().unwrap() {
        let f = f.as_str().unwrap();
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn monte_carlo_is_seed_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 11, "k_max": 3, "k_range": [3], "caps": {"samples": 2000}}"#,
    );
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    for d in [&a, &b] {
        assert_eq!(run("adelic", &cfg, d, &[]).status.code(), Some(0));
    }
    assert_eq!(
        fs::read(a.join("gap_report.json")).unwrap(),
        fs::read(b.join("gap_report.json")).unwrap()
    );
    assert_eq!(
        run("adelic", &cfg, &c, &["--seed", "12"]).status.code(),
        Some(0)
    );
    let chi = |d: &Path| num(&read_json(&d.join("gap_report.json"))["data"]["rows"][0]["chi"]);
    assert_ne!(chi(&a), chi(&c));
}

#[test]
fn adelic_lattice_values() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 0, "k_max": 2}"#);
    let out = tmp.path().join("out");
    let o = run("adelic", &cfg, &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let gap = read_json(&out.join("gap_report.json"));
    let row = &gap["data"]["rows"][0];
    assert_eq!(row["small_count"], 5);
    assert!((num(&row["chi"]) - std::f64::consts::PI.ln()).abs() < 1e-12);
    assert!((num(&row["gs_ratio"]) - 5f64.ln() / (2.0 * 2f64.ln())).abs() < 1e-12);
    assert_eq!(gap["data"]["complete"], true);
    let minima = read_json(&out.join("minima.json"));
    assert_eq!(
        minima["data"][0]["minima"]["lambdas"][1],
        minima["data"][0]["minima"]["lambdas"][0]
    );
    assert!(out.join("capacity.json").exists());
}

#[test]
fn budget_errors_keep_partial_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 0, "k_max": 3}"#);
    let out = tmp.path().join("out");
    let o = run("adelic", &cfg, &out, &["--enumeration-cap", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    let gap = read_json(&out.join("gap_report.json"));
    assert_eq!(gap["data"]["complete"], false);
    // Degrees 1 and 2 fit in the cap, degree 3 does not.
    assert_eq!(gap["data"]["rows"].as_array().unwrap().len(), 2);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["status"], "error");
    assert!(manifest["error"].as_str().unwrap().contains("at least"));
}

#[test]
fn schema_violations_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    for body in [
        r#"{"k_max": 2}"#,
        r#"{"seed": 0, "kmax": 2}"#,
        r#"{"seed": 0, "metric": {"kind": "hyperbolic"}}"#,
        "not json",
    ] {
        let cfg = write_config(tmp.path(), "bad.json", body);
        let o = run("body", &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
    assert!(!out.exists());
}

#[test]
fn pipeline_field_must_match_subcommand() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"pipeline": "compare", "seed": 0}"#,
    );
    let o = run("body", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", P2_BODY);
    let out = tmp.path().join("from-env");
    let o = bin()
        .arg("body")
        .arg(&cfg)
        .env("OKOUNKOV_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn flags_override_scalars_and_the_hash() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", P2_BODY);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run("body", &cfg, &a, &[]);
    run("body", &cfg, &b, &["--k-max", "1"]);
    let (ma, mb) = (
        read_json(&a.join("manifest.json")),
        read_json(&b.join("manifest.json")),
    );
    assert_ne!(ma["config_sha256"], mb["config_sha256"]);
    assert_eq!(read_json(&b.join("config.json"))["data"]["k_max"], 1);
    assert_eq!(read_json(&b.join("body.json"))["data"]["volume"], "1/2");
}

#[test]
fn compare_counterexample() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "model": {"kind": "projective", "n": 1, "point": ["1"]}, "k_max": 4}"#,
    );
    let out = tmp.path().join("out");
    let o = run("compare", &cfg, &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let c = read_json(&out.join("comparison.json"));
    assert!((num(&c["data"]["inf_H"]) + 0.5 * 2f64.ln()).abs() < 1e-9);
    assert!(num(&c["data"]["inf_G"]) >= 0.0);
    assert_eq!(c["data"]["configuration"], "counterexample");
    for f in ["G.plotdata", "H.plotdata", "minus_gstar.plotdata"] {
        assert!(out.join(f).exists());
    }
}

#[test]
fn compare_toric_trend() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"seed": 0, "k_max": 8}"#);
    let out = tmp.path().join("out");
    assert_eq!(run("compare", &cfg, &out, &[]).status.code(), Some(0));
    let c = read_json(&out.join("comparison.json"));
    assert_eq!(c["data"]["configuration"], "toric");
    assert_eq!(c["data"]["asserted"].as_array().unwrap().len(), 2);
    assert_eq!(c["data"]["pass"], true);
}

#[test]
fn compare_refuses_unknown_weights() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "metric": {"kind": "l2_invariant"}}"#,
    );
    assert_eq!(
        run("compare", &cfg, &tmp.path().join("out"), &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn measure_emits_jump_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "k_max": 10, "k_range": [4, 10], "filtration": {"kind": "weight", "weights": ["1", "0"]}}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run("measure", &cfg, &out, &[]).status.code(), Some(0));
    let jumps = fs::read_to_string(out.join("jumps_k4.csv")).unwrap();
    let atoms: Vec<f64> = jumps
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(atoms.len(), 5);
    assert!(atoms.windows(2).all(|w| w[0] >= w[1]));
    let table = fs::read_to_string(out.join("measure.csv")).unwrap();
    for line in table.lines().skip(2) {
        let levy: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        let k: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(levy <= 2.0 / k);
    }
}

#[test]
fn envelope_on_p1_at_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "model": {"kind": "projective", "n": 1, "point": ["2"]}, "k_max": 3}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run("envelope", &cfg, &out, &[]).status.code(), Some(0));
    let plot = fs::read_to_string(out.join("envelope.plotdata")).unwrap();
    let last = plot.lines().last().unwrap();
    let h1: f64 = last.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((h1 + 0.5 * 5f64.ln()).abs() < 1e-9);
    let h = fs::read_to_string(out.join("h_values.csv")).unwrap();
    assert!(h.lines().nth(1).unwrap() == "k,alpha,h,exact");
}

#[test]
fn acceptance_subset_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 0, "criteria": [1, 3, 4]}"#,
    );
    let out = tmp.path().join("out");
    let o = run("acceptance", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(
        stdout
            .lines()
            .filter(|l| l.starts_with("criterion"))
            .count(),
        3
    );
    assert_eq!(
        read_json(&out.join("acceptance.json"))["data"]["pass"],
        true
    );
}
