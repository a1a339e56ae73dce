use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use expovl::check::{run_checks, CheckOptions};
use expovl::confidence::{interval_report, CiTarget, ConfidenceInterval};
use expovl::estimation::{estimate_report, ratio_estimates, EstimatorOptions, TwoSample};
use expovl::measures::quartet_of_r;
use expovl::simulation::{
    compare_to_reference, figure_rows, run_study, table_rows, theory_report, FigureKind, ReferenceComparison,
    SimConfig, TheoryReport, DEFAULT_SEED, REFERENCE_REPLICATIONS, REFERENCE_R_VALUES, REFERENCE_SAMPLE_SIZES,
};
use expovl::{Coefficient, Error, RatioR};

use crate::input::read_sample;
use crate::output::{fmt3, fmt3_opt, text_table, to_csv, to_json, Format, OutputSpec};
use crate::svg::{line_chart, Series};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_REPRODUCTION: u8 = 4;
pub const EXIT_SELF_CHECK: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        Self { code: EXIT_INPUT, message }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InsufficientSampleSize(_) | Error::EmptySample(_) | Error::InvalidConfig(_) => EXIT_DATA,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), CliError>;

fn load(file1: &Path, file2: &Path) -> Result<TwoSample, CliError> {
    Ok(TwoSample::new(read_sample(file1)?, read_sample(file2)?)?)
}

#[derive(Serialize)]
struct Quantity {
    quantity: String,
    value: Option<f64>,
}

pub fn estimate(file1: &Path, file2: &Path, out: &OutputSpec) -> CmdResult {
    let samples = load(file1, file2)?;
    let report = estimate_report(&samples, EstimatorOptions::default())?;
    let ratio = &report.ratio;
    let text = match out.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut rows = vec![
                ("n1", Some(report.n1 as f64)),
                ("n2", Some(report.n2 as f64)),
                ("theta1_hat", Some(ratio.theta1_hat)),
                ("theta2_hat", Some(ratio.theta2_hat)),
                ("r_hat", Some(ratio.r_hat)),
                ("r_hat_star", Some(ratio.r_hat_star)),
                ("var_r_hat_star", ratio.var_r_hat_star),
            ]
            .into_iter()
            .map(|(q, value)| Quantity { quantity: q.to_string(), value })
            .collect::<Vec<_>>();
            for (c, e) in report.coefficients.iter() {
                rows.push(Quantity { quantity: format!("{}_point", c.name()), value: Some(e.point) });
                rows.push(Quantity { quantity: format!("{}_variance", c.name()), value: Some(e.approx_variance) });
                rows.push(Quantity { quantity: format!("{}_bias", c.name()), value: e.approx_bias });
            }
            to_csv(rows)
        }
        Format::Table => {
            let mut s = format!(
                "n1 = {}, n2 = {}\ntheta1_hat = {}, theta2_hat = {}\nR_hat = {}, R_hat* = {}, Var(R_hat*) = {}\n\n",
                report.n1,
                report.n2,
                fmt3(ratio.theta1_hat),
                fmt3(ratio.theta2_hat),
                fmt3(ratio.r_hat),
                fmt3(ratio.r_hat_star),
                fmt3_opt(ratio.var_r_hat_star),
            );
            let rows: Vec<Vec<String>> = report
                .coefficients
                .iter()
                .map(|(c, e)| vec![c.name().to_string(), fmt3(e.point), fmt3(e.approx_variance), fmt3_opt(e.approx_bias)])
                .collect();
            s += &text_table(&["coefficient", "estimate", "variance", "bias"], &rows);
            s
        }
    };
    out.emit(&text)
}

#[derive(Serialize)]
struct IntervalRow {
    target: String,
    lower: f64,
    upper: f64,
    level: f64,
    contains_one: bool,
}

fn target_name(t: CiTarget) -> String {
    match t {
        CiTarget::Ratio => "ratio".to_string(),
        CiTarget::Overlap(c) => c.name().to_string(),
    }
}

pub fn ci(file1: &Path, file2: &Path, level: f64, out: &OutputSpec) -> CmdResult {
    let samples = load(file1, file2)?;
    let report = interval_report(&ratio_estimates(&samples), level)?;
    let intervals: Vec<&ConfidenceInterval> =
        std::iter::once(&report.ratio).chain(report.overlaps.iter().map(|(_, ci)| ci)).collect();
    let text = match out.format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(intervals.iter().map(|ci| IntervalRow {
            target: target_name(ci.target),
            lower: ci.lower,
            upper: ci.upper,
            level: ci.level,
            contains_one: ci.contains_one,
        })),
        Format::Table => {
            let rows: Vec<Vec<String>> = intervals
                .iter()
                .map(|ci| vec![target_name(ci.target), fmt3(ci.lower), fmt3(ci.upper)])
                .collect();
            let mut s = format!("{}% confidence intervals\n", level * 100.0);
            s += &text_table(&["target", "lower", "upper"], &rows);
            if report.ratio.contains_one {
                s += "\nThe interval for R encloses 1, so every coefficient interval reaches 1: equality of the two populations is not excluded.\n";
            }
            s
        }
    };
    out.emit(&text)
}

#[derive(Debug, Serialize)]
struct CurveRow {
    r: f64,
    delta: f64,
    rho: f64,
    lambda: f64,
    kl_lambda: f64,
}

pub fn curves(r_min: f64, r_max: f64, points: usize, svg: Option<&Path>, out: &OutputSpec) -> CmdResult {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(CliError::input(format!("need 0 < r-min < r-max, got {r_min} and {r_max}")));
    }
    if points < 2 {
        return Err(CliError::input(format!("need at least 2 points, got {points}")));
    }
    let rows = (0..points)
        .map(|i| {
            let r = r_min + (r_max - r_min) * i as f64 / (points - 1) as f64;
            let q = quartet_of_r(RatioR::new(r)?);
            Ok(CurveRow { r, delta: q.delta, rho: q.rho, lambda: q.lambda, kl_lambda: q.kl_lambda })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    if let Some(path) = svg {
        let series: Vec<Series> = Coefficient::ALL
            .iter()
            .map(|&c| Series {
                label: c.name(),
                points: rows
                    .iter()
                    .map(|row| (row.r, *quartet_of_r(RatioR::new(row.r).expect("grid is positive")).get(c)))
                    .collect(),
            })
            .collect();
        let chart = line_chart("Overlap coefficients of two exponential laws", "R", &series);
        fs::write(path, chart).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }

    let text = match out.format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(&rows),
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![fmt3(r.r), fmt3(r.delta), fmt3(r.rho), fmt3(r.lambda), fmt3(r.kl_lambda)])
                .collect();
            text_table(&["R", "delta", "rho", "lambda", "kl_lambda"], &body)
        }
    };
    out.emit(&text)
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Comma-separated ratios R.
    #[arg(long = "r", value_delimiter = ',', default_values_t = REFERENCE_R_VALUES)]
    pub r_values: Vec<f64>,
    /// Comma-separated sample sizes.
    #[arg(long = "n", value_delimiter = ',', default_values_t = REFERENCE_SAMPLE_SIZES)]
    pub sample_sizes: Vec<usize>,
    #[arg(long, default_value_t = REFERENCE_REPLICATIONS)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Mean of the second population.
    #[arg(long, default_value_t = 1.0)]
    pub theta2: f64,
    /// Fixed size of the second sample (default: equal to n).
    #[arg(long)]
    pub n2: Option<usize>,
    /// Evaluate Λ at the corrected ratio as well.
    #[arg(long)]
    pub lambda_corrected: bool,
}

pub const TABLE_FILE: &str = "table.csv";
pub const SUMMARY_FILE: &str = "summary.json";
const DEFAULT_SIMULATION_DIR: &str = "expovl-simulation";

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a SimConfig,
    files: Vec<String>,
    reference: Option<&'a ReferenceComparison>,
    theory: &'a TheoryReport,
}

pub fn simulate(args: &SimulateArgs, out: &OutputSpec) -> CmdResult {
    let cfg = SimConfig {
        r_values: args.r_values.clone(),
        sample_sizes: args.sample_sizes.clone(),
        replications: args.reps,
        seed: args.seed,
        theta2: args.theta2,
        n2: args.n2,
        lambda_uses_corrected_ratio: args.lambda_corrected,
    };
    cfg.validate()?;
    let table = run_study(&cfg)?;
    let comparison = match compare_to_reference(&table) {
        Ok(c) => Some(c),
        Err(Error::GridMismatch(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let theory = theory_report(&table)?;

    let dir: PathBuf = out.destination.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_SIMULATION_DIR));
    fs::create_dir_all(&dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    };

    let rows = table_rows(&table, comparison.as_ref());
    let table_csv = to_csv(&rows);
    write(TABLE_FILE, &table_csv)?;
    let mut files = vec![TABLE_FILE.to_string()];
    for kind in FigureKind::ALL {
        let name = format!("{}.csv", kind.file_stem());
        write(&name, &to_csv(figure_rows(&table, kind)))?;
        files.push(name);
    }
    files.push(SUMMARY_FILE.to_string());
    let summary = Summary { config: &cfg, files, reference: comparison.as_ref(), theory: &theory };
    let summary_json = to_json(&summary);
    write(SUMMARY_FILE, &summary_json)?;

    let text = match out.format {
        Format::Json => summary_json,
        Format::Csv => table_csv,
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        format!("{}", r.r),
                        r.n.to_string(),
                        r.coefficient.name().to_string(),
                        fmt3(r.bias),
                        fmt3(r.mse),
                        format!("{:.2}", r.ratio),
                        fmt3_opt(r.reference_bias),
                        fmt3_opt(r.reference_mse),
                        r.pass.clone(),
                    ]
                })
                .collect();
            let mut s = text_table(
                &["R", "n", "coefficient", "bias", "mse", "bias/sd", "ref_bias", "ref_mse", "verdict"],
                &body,
            );
            if let Some(c) = &comparison {
                s += &format!(
                    "\nreference comparison: {} passed, {} failed, {} excluded; pass rate {:.3} (required {:.2}) -> {}\n",
                    c.passed,
                    c.failed,
                    c.excluded,
                    c.pass_rate,
                    c.required_pass_rate,
                    if c.reproduced { "reproduced" } else { "not reproduced" }
                );
            }
            s += &format!("outputs written to {}\n", dir.display());
            s
        }
    };
    // the files already live in `dir`; only the report goes to stdout
    OutputSpec { format: out.format, destination: None }.emit(&text)?;

    match comparison {
        Some(c) if !c.reproduced => Err(CliError {
            code: EXIT_REPRODUCTION,
            message: format!("reference table not reproduced: pass rate {:.3} < {:.2}", c.pass_rate, c.required_pass_rate),
        }),
        _ => Ok(()),
    }
}

pub fn check(seed: u64, perturb_rho: f64, out: &OutputSpec) -> CmdResult {
    let opts = CheckOptions { seed, rho_perturbation: perturb_rho, ..CheckOptions::default() };
    let report = run_checks(&opts)?;
    let text = match out.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                suite: &'a str,
                passed: bool,
                checks: usize,
                failures: usize,
            }
            to_csv(report.suites.iter().map(|s| Row {
                suite: &s.name,
                passed: s.passed,
                checks: s.checks,
                failures: s.failures.len(),
            }))
        }
        Format::Table => {
            let mut s = String::new();
            for suite in &report.suites {
                let verdict = if suite.passed { "PASS" } else { "FAIL" };
                s += &format!("{verdict} {} ({} checks)\n", suite.name, suite.checks);
                for f in suite.failures.iter().take(5) {
                    s += &format!("    {f}\n");
                }
                if suite.failures.len() > 5 {
                    s += &format!("    ... {} more\n", suite.failures.len() - 5);
                }
            }
            s
        }
    };
    out.emit(&text)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError { code: EXIT_SELF_CHECK, message: "self-check failed".into() })
    }
}
