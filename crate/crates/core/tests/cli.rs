// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use cpinfer::sim::{gen_noise, NoiseKind, NoiseSpec};
use cpinfer::DetectionResult;

fn cpinfer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpinfer"))
        .args(args)
        .env("CPINFER_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn write_series(path: &Path, header: Option<&str>, values: &[f64]) {
    let mut text = header.map(|h| format!("{h}\n")).unwrap_or_default();
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn step_data() -> Vec<f64> {
    let noise = gen_noise(&NoiseSpec::new(NoiseKind::N1, 1.0, 4), 500).unwrap();
    noise
        .iter()
        .enumerate()
        .map(|(i, z)| if i < 250 { *z } else { z + 4.0 })
        .collect()
}

#[test]
fn detect_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.csv");
    write_series(&path, Some("value"), &step_data());
    let out = cpinfer(&["detect", "-i", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res: DetectionResult = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(res.n, 500);
    assert_eq!(res.intervals.len(), 1);
    assert!(res.intervals[0].contains(250));
    let again: DetectionResult =
        serde_json::from_str(&serde_json::to_string(&res).unwrap()).unwrap();
    assert_eq!(again.intervals, res.intervals);
}

#[test]
fn detect_formats_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let y = step_data();
    let text: String = std::iter::once("t,level\n".to_string())
        .chain(y.iter().enumerate().map(|(i, v)| format!("{},{v}\n", i + 1)))
        .collect();
    std::fs::write(&path, text).unwrap();
    let plot = dir.path().join("plot.csv");
    let p = path.to_str().unwrap();

    let csv = cpinfer(&["detect", "-i", p, "-c", "level", "-f", "csv", "--plot-data", plot.to_str().unwrap()]);
    assert!(csv.status.success());
    let body = stdout(&csv);
    assert!(body.starts_with("start,end,width,stat,eta_hat"));
    assert_eq!(body.lines().count(), 2);

    let rows = std::fs::read_to_string(&plot).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("t,y,interval_id,eta_flag"));
    let data: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(data.len(), 500);
    assert_eq!(data.iter().filter(|r| r[3] == "1").count(), 1);
    assert!(data.iter().any(|r| r[2] == "1"));

    let human = cpinfer(&["detect", "-i", p, "-c", "1", "-f", "human", "--mode", "dep"]);
    assert!(human.status.success());
    assert!(stdout(&human).contains("lrv"));
}

#[test]
fn change_free_input_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    let noise = gen_noise(&NoiseSpec::new(NoiseKind::N1, 1.0, 1), 400).unwrap();
    write_series(&path, None, &noise);
    let out = cpinfer(&["detect", "--input", path.to_str().unwrap(), "--alpha", "0.1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["intervals"].is_array());
}

#[test]
fn failures_are_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1\n2\nNA\n4\n").unwrap();
    let out = cpinfer(&["detect", "-i", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "parse");
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:3:"));

    let missing = cpinfer(&["detect", "-i", "/nonexistent/file.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(error_kind(&missing), "io");

    let lrv = cpinfer(&["detect", "-i", bad.to_str().unwrap(), "--estimator", "lrv", "--mode", "gauss"]);
    assert_eq!(lrv.status.code(), Some(1));
    assert_eq!(error_kind(&lrv), "config");

    let usage = cpinfer(&["detect", "--bogus"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error_kind(&usage), "usage");
}

#[test]
fn thresholds_report_constants() {
    let out = cpinfer(&["thresholds", "-n", "750", "-p", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["c_p"].as_f64(), Some(5.0));
    let lambda = v["lambda_alpha"].as_f64().unwrap();
    assert!((lambda - 4.309602839812472).abs() < 1e-6, "{lambda}");
}

#[test]
fn bench_reports_grid_and_timing() {
    let out = cpinfer(&["bench", "--sizes", "4096,16384", "--repeats", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["evaluations"].as_u64().unwrap() <= r["grid_size"].as_u64().unwrap());
    }
    assert!(v["time_ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "kind = \"coverage\"\nreps = 6\nseed = 9\nn = 200\nmethods = [\"DIF1-MAD\"]\nnoise = [\"N1\"]\ndegrees = [0]\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let json = cpinfer(&["simulate", "--config", p]);
    assert!(json.status.success(), "{}", String::from_utf8_lossy(&json.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);

    let csv = cpinfer(&["simulate", "--config", p, "-f", "csv", "--threads", "1"]);
    assert_eq!(stdout(&csv).lines().count(), 2);

    let preset = cpinfer(&["simulate", "--preset", "hills", "--reps", "2", "-f", "human"]);
    assert!(preset.status.success());
    assert_eq!(stdout(&preset).lines().count(), 13);

    let both = cpinfer(&["simulate", "--config", p, "--preset", "blocks"]);
    assert_eq!(both.status.code(), Some(2));
}
