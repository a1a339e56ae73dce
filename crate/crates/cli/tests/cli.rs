use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use expovl::distributions::{sample_exponential, SeededStream};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expovl")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_sample(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let path = dir.join(name);
    let body: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(&path, format!("# generated\n\n{body}")).unwrap();
    path
}

fn simulated(dir: &Path, name: &str, theta: f64, n: usize, stream: u64) -> PathBuf {
    let xs = sample_exponential(&mut SeededStream::new(77, stream), theta, n).unwrap();
    write_sample(dir, name, &xs)
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn estimate_constant_samples() {
    let dir = TempDir::new().unwrap();
    let a = write_sample(dir.path(), "a.txt", &[1.0; 20]);
    let b = write_sample(dir.path(), "b.txt", &[1.0; 20]);
    let o = run(&["--format", "json", "estimate", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["ratio"]["r_hat"], 1.0);
    assert!((v["ratio"]["r_hat_star"].as_f64().unwrap() - 0.95).abs() < 1e-15);
    assert_eq!(v["coefficients"]["kl_lambda"]["point"], 1.0);
}

#[test]
fn estimate_rejects_negative_with_line_number() {
    let dir = TempDir::new().unwrap();
    let a = write_sample(dir.path(), "a.txt", &[1.0; 5]);
    let b = dir.path().join("b.txt");
    fs::write(&b, "2.0\n# note\n-1.0\n").unwrap();
    let o = run(&["estimate", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.txt:3"));
}

#[test]
fn estimate_needs_three_in_second_sample() {
    let dir = TempDir::new().unwrap();
    let a = write_sample(dir.path(), "a.txt", &[1.0; 5]);
    let b = write_sample(dir.path(), "b.txt", &[1.0, 2.0]);
    assert_eq!(code(&run(&["estimate", a.to_str().unwrap(), b.to_str().unwrap()])), 3);
}

#[test]
fn estimate_large_samples() {
    let dir = TempDir::new().unwrap();
    let a = simulated(dir.path(), "a.txt", 1.0, 10_000, 0);
    let b = simulated(dir.path(), "b.txt", 2.0, 10_000, 1);
    let o = run(&["--format", "csv", "estimate", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let delta: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("delta_point,"))
        .expect("delta row")
        .parse()
        .unwrap();
    assert!((delta - 0.75).abs() < 0.02, "{delta}");
}

#[test]
fn ci_identical_samples_reach_one() {
    let dir = TempDir::new().unwrap();
    let a = simulated(dir.path(), "a.txt", 1.0, 500, 3);
    let o = run(&["--format", "json", "ci", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["ratio"]["contains_one"], true);
    for c in ["delta", "rho", "lambda", "kl_lambda"] {
        assert_eq!(v["overlaps"][c]["upper"], 1.0);
        assert_eq!(v["overlaps"][c]["contains_one"], true);
    }
}

#[test]
fn ci_f_table_anchor() {
    let dir = TempDir::new().unwrap();
    let a = write_sample(dir.path(), "a.txt", &[2.0; 10]);
    let o = run(&["--format", "csv", "ci", a.to_str().unwrap(), a.to_str().unwrap(), "--level", "0.95"]);
    let text = stdout(&o);
    let ratio: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("ratio,"))
        .unwrap()
        .split(',')
        .skip(1)
        .take(2)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((ratio[0] - 0.4058).abs() < 5e-4 && (ratio[1] - 2.4645).abs() < 5e-4, "{ratio:?}");
}

#[test]
fn ci_bad_level_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let a = write_sample(dir.path(), "a.txt", &[1.0; 5]);
    let o = run(&["ci", a.to_str().unwrap(), a.to_str().unwrap(), "--level", "1.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn curves_rows_and_svg() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("c.svg");
    let o = run(&[
        "--format", "json", "curves", "--r-min", "0.2", "--r-max", "1", "--points", "5", "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let first = &rows[0];
    for (k, want) in [("delta", 0.465), ("rho", 0.745), ("lambda", 0.556), ("kl_lambda", 0.238)] {
        assert!((first[k].as_f64().unwrap() - want).abs() < 5e-4, "{k}");
    }
    let last = &rows[4];
    for k in ["r", "delta", "rho", "lambda", "kl_lambda"] {
        assert_eq!(last[k], 1.0);
    }
    for row in rows {
        let (rho, lambda) = (row["rho"].as_f64().unwrap(), row["lambda"].as_f64().unwrap());
        assert!(lambda <= rho);
        assert!((lambda - rho * rho).abs() < 1e-14);
    }
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn curves_usage_errors() {
    assert_eq!(code(&run(&["curves", "--r-min", "2", "--r-max", "1"])), 2);
    assert_eq!(code(&run(&["curves", "--points", "1"])), 2);
}

#[test]
fn simulate_small_grid_writes_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    let o = run(&[
        "--format", "json", "--output", out.to_str().unwrap(), "simulate", "--r", "0.3,0.7", "--n", "10,40",
        "--reps", "200", "--seed", "5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["figure_bias.csv", "figure_mse.csv", "figure_std_dev.csv", "summary.json", "table.csv"]);
    let summary = json(&o);
    assert!(summary["reference"].is_null());
    assert_eq!(summary["theory"]["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn simulate_csv_round_trips_in_memory_values() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    let o = run(&[
        "--output", out.to_str().unwrap(), "simulate", "--r", "0.4", "--n", "25", "--reps", "300", "--seed", "9",
    ]);
    assert_eq!(code(&o), 0);
    let table = expovl::simulation::run_study(&expovl::simulation::SimConfig {
        r_values: vec![0.4],
        sample_sizes: vec![25],
        replications: 300,
        seed: 9,
        ..Default::default()
    })
    .unwrap();
    let expected = expovl::simulation::table_rows(&table, None);
    let parsed: Vec<expovl::simulation::TableRow> = csv::Reader::from_path(out.join("table.csv"))
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(parsed, expected);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let runs: Vec<PathBuf> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("run{i}"));
            let o = run(&["--output", out.to_str().unwrap(), "simulate", "--n", "20,50", "--reps", "300"]);
            assert_eq!(code(&o), 0);
            out
        })
        .collect();
    for f in ["table.csv", "figure_bias.csv", "figure_std_dev.csv", "figure_mse.csv", "summary.json"] {
        assert_eq!(fs::read(runs[0].join(f)).unwrap(), fs::read(runs[1].join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_config_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    assert_eq!(code(&run(&["--output", out.to_str().unwrap(), "simulate", "--reps", "1"])), 3);
    assert_eq!(code(&run(&["--output", out.to_str().unwrap(), "simulate", "--r=0"])), 3);
}

/// The default run compares against the reference table. Its exit status
/// reflects the verdict: 0 when reproduced, 4 otherwise.
#[test]
fn simulate_default_reports_reference_verdict() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    let o = run(&["--format", "json", "--output", out.to_str().unwrap(), "simulate"]);
    let summary = json(&o);
    let reference = &summary["reference"];
    assert_eq!(reference["entries"].as_array().unwrap().len(), 120);
    let reproduced = reference["reproduced"].as_bool().unwrap();
    assert_eq!(code(&o), if reproduced { 0 } else { 4 });
}

#[test]
fn check_passes_and_emits_json() {
    let o = run(&["--format", "json", "check"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn check_detects_perturbed_rho() {
    let o = run(&["--format", "json", "check", "--perturb-rho", "1e-4"]);
    assert_eq!(code(&o), 5);
    let v = json(&o);
    let oracle = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "oracle_equivalence").unwrap();
    assert_eq!(oracle["passed"], false);
}
