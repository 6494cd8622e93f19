use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use condcopula::model_io;
use condcopula_core::{fit, BivariateSample, Method, TiePolicy};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_condcopula"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_csv(dir: &Path, name: &str, rows: &[(f64, f64)]) -> PathBuf {
    let path = dir.join(name);
    let mut text = String::from("x,y\n");
    for (x, y) in rows {
        text.push_str(&format!("{x},{y}\n"));
    }
    fs::write(&path, text).unwrap();
    path
}

fn rows(n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|i| (i as f64 * 0.37 % 11.0, ((i * 7919) % 1009) as f64 / 100.0 + i as f64 * 1e-3)).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fit_reports_resolution_and_writes_model() {
    let dir = TempDir::new().unwrap();
    let input = write_csv(dir.path(), "data.csv", &rows(100));
    let model = dir.path().join("m.bin");
    let out = run(&["fit", "--input", s(&input), "--output", s(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("n = 100") && text.contains("N = 7") && text.contains("method = checkerboard"), "{text}");
    let loaded = model_io::read_model(fs::File::open(&model).unwrap()).unwrap();
    assert_eq!(loaded.resolution().get(), 7);
}

#[test]
fn tie_under_error_policy_exits_2_naming_rows() {
    let dir = TempDir::new().unwrap();
    let mut data = rows(30);
    data[6].1 = data[2].1;
    let input = write_csv(dir.path(), "ties.csv", &data);
    let out = run(&["fit", "--input", s(&input), "--output", s(&dir.path().join("m.bin"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("tied y values in data rows 3 and 7"), "{err}");
}

#[test]
fn fitting_is_byte_reproducible_given_a_seed() {
    let dir = TempDir::new().unwrap();
    let data: Vec<(f64, f64)> = rows(200).into_iter().enumerate().map(|(i, (x, _))| (x, (i % 5) as f64)).collect();
    let input = write_csv(dir.path(), "ties.csv", &data);
    let mut blobs = Vec::new();
    for (name, seed) in [("a.bin", "9"), ("b.bin", "9"), ("c.bin", "10")] {
        let path = dir.path().join(name);
        let out = run(&["fit", "--input", s(&input), "--output", s(&path), "--tie-policy", "random", "--seed", seed]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stderr(&out).contains("tied observations"));
        blobs.push(fs::read(path).unwrap());
    }
    assert_eq!(blobs[0], blobs[1]);
    assert_ne!(blobs[0], blobs[2]);
}

#[test]
fn loaded_model_predicts_like_the_in_memory_fit() {
    let dir = TempDir::new().unwrap();
    let data = rows(300);
    let input = write_csv(dir.path(), "data.csv", &data);
    for method in ["checkerboard", "bernstein"] {
        let path = dir.path().join(format!("{method}.bin"));
        let out = run(&["fit", "--input", s(&input), "--output", s(&path), "--method", method]);
        assert!(out.status.success(), "{}", stderr(&out));
        let loaded = model_io::read_model(fs::File::open(&path).unwrap()).unwrap();
        let direct = fit(
            &BivariateSample::new(data.clone()).unwrap(),
            method.parse::<Method>().unwrap(),
            0.45,
            TiePolicy::Error,
            None,
        )
        .unwrap();
        for k in 0..40 {
            let x = -0.5 + k as f64 * 0.3;
            assert_eq!(loaded.predict_mean(x).to_bits(), direct.predict_mean(x).to_bits());
            assert_eq!(loaded.predict_variance(x).to_bits(), direct.predict_variance(x).to_bits());
            let (a, b) = (loaded.predict_quantile(x, 0.3).unwrap(), direct.predict_quantile(x, 0.3).unwrap());
            assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        }
    }
}

fn fitted(dir: &Path) -> PathBuf {
    let input = write_csv(dir, "data.csv", &rows(400));
    let model = dir.join("m.bin");
    assert!(run(&["fit", "--input", s(&input), "--output", s(&model)]).status.success());
    model
}

fn queries(dir: &Path, m: usize) -> PathBuf {
    let q: Vec<(f64, f64)> = (0..m).map(|i| (i as f64 * 11.0 / m as f64, 5.0)).collect();
    write_csv(dir, "queries.csv", &q)
}

#[test]
fn predict_writes_requested_columns() {
    let dir = TempDir::new().unwrap();
    let model = fitted(dir.path());
    let q = queries(dir.path(), 25);
    let out = run(&[
        "predict",
        "--model",
        s(&model),
        "--input",
        s(&q),
        "--columns",
        "mean,q_mid,expectile,variance,cdf",
        "--tau",
        "0.5",
        "--alpha",
        "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,mean,q_mid,expectile,variance,cdf"));
    let body: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(body.len(), 25);
    let ys: Vec<f64> = rows(400).iter().map(|r| r.1).collect();
    let (lo, hi) =
        (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    for row in body {
        assert!((row[2] - row[3]).is_finite());
        for v in [row[1], row[2], row[3]] {
            assert!((lo..=hi).contains(&v));
        }
        assert!(row[4] >= 0.0 && (0.0..=1.0).contains(&row[5]));
    }
}

#[test]
fn batch_and_scalar_predictions_are_identical() {
    let dir = TempDir::new().unwrap();
    let model = fitted(dir.path());
    let q = queries(dir.path(), 500);
    let batch = run(&["predict", "--model", s(&model), "--input", s(&q)]);
    let scalar = run(&["predict", "--model", s(&model), "--input", s(&q), "--scalar"]);
    assert!(batch.status.success() && scalar.status.success());
    assert_eq!(stdout(&batch).lines().count(), 501);
    assert_eq!(batch.stdout, scalar.stdout);
}

#[test]
fn predict_requires_levels() {
    let dir = TempDir::new().unwrap();
    let model = fitted(dir.path());
    let q = queries(dir.path(), 3);
    let out = run(&["predict", "--model", s(&model), "--input", s(&q), "--columns", "q_lower"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--tau"));
    let out = run(&["predict", "--model", s(&model), "--input", s(&q), "--columns", "expectile"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--alpha"));
}

#[test]
fn unreadable_paths_fail_cleanly() {
    let out = run(&["fit", "--input", "/nonexistent/data.csv", "--output", "/tmp/never.bin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/data.csv"));
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk")
}

#[test]
fn simulate_is_reproducible_and_counts_records() {
    let dir = TempDir::new().unwrap();
    let config = configs().join("amh_convergence.json");
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = run(&["simulate", "--config", s(&config), "--output", s(&path), "--replications", "2"]);
        assert!(out.status.success(), "{}", stderr(&out));
        reports.push(fs::read(&path).unwrap());
        assert!(path.with_extension("csv").exists());
    }
    assert_eq!(reports[0], reports[1]);
    let report: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 2 * 3);
    assert_eq!(report["config"]["copula_convergence"]["replications"], 2);
}

#[test]
fn simulate_rejects_unknown_family_with_field_path() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(
        &config,
        r#"{"copula_convergence": {"family": "frank", "theta": 1, "n_grid": [100], "replications": 2}}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", s(&config), "--output", s(&dir.path().join("r.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("copula_convergence.family") && err.contains("frank"), "{err}");
}

#[test]
fn shipped_configs_parse() {
    for scale in ["desk", "paper"] {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(scale);
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            condcopula::ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}

#[test]
fn split_bench_on_the_stand_in() {
    let dir = TempDir::new().unwrap();
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/loss_standin.csv");
    let output = dir.path().join("split.json");
    let summary = dir.path().join("split_summary.csv");
    let out = run(&[
        "split-bench",
        "--input",
        s(&input),
        "--x-column",
        "loss",
        "--y-column",
        "alae",
        "--log-x",
        "--log-y",
        "--replications",
        "5",
        "--output",
        s(&output),
        "--summary",
        s(&summary),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(output).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 10);
    assert_eq!(fs::read_to_string(summary).unwrap().lines().count(), 1 + 4);
}

#[test]
fn bench_emits_timing_csv() {
    let out = run(&["bench", "--n", "500", "--ms", "0,100,1000", "--repeats", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("n,m,method,seconds\n"));
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(stderr(&out).contains("cbe: log-log slope"));
}
