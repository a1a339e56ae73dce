//! Seeded Monte Carlo study of the four estimators.
//!
//! Every replication of every cell draws from its own substream, keyed by the
//! study seed, the cell's `(R, n)` and the replication index, so results do
//! not depend on scheduling. Replications run in parallel; their errors are
//! collected in replication order and reduced sequentially, which keeps the
//! output bit-identical for any thread count.

mod compare;
mod export;
mod reference;
mod theory;

pub use compare::{compare_to_reference, CellComparison, ComparisonStatus, ReferenceComparison, Statistic, REQUIRED_PASS_RATE};
pub use export::{figure_rows, table_rows, FigureKind, FigureRow, TableRow};
pub use reference::{reference_entries, ReferenceEntry, REFERENCE_REPLICATIONS, REFERENCE_R_VALUES, REFERENCE_SAMPLE_SIZES};
pub use theory::{theoretical_vs_empirical, theory_report, BiasVerdict, TheoryReport, TheoryRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::SeededStream;
use crate::error::{Error, Result};
use crate::estimation::{ovl_point_estimates, EstimatorOptions, RatioEstimates};
use crate::measures::{quartet_of_r, Coefficient, OverlapQuartet, PerCoefficient, RatioR};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_180_101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub r_values: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    /// Mean of the second population; the first has mean `R·theta2`.
    pub theta2: f64,
    /// Fixed second-sample size. `None` draws both samples with the cell's `n`.
    pub n2: Option<usize>,
    pub lambda_uses_corrected_ratio: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            r_values: REFERENCE_R_VALUES.to_vec(),
            sample_sizes: REFERENCE_SAMPLE_SIZES.to_vec(),
            replications: REFERENCE_REPLICATIONS,
            seed: DEFAULT_SEED,
            theta2: 1.0,
            n2: None,
            lambda_uses_corrected_ratio: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.replications < 2 {
            return bad(format!("replications must be at least 2, got {}", self.replications));
        }
        if self.r_values.is_empty() || self.sample_sizes.is_empty() {
            return bad("the R and n grids must be non-empty".into());
        }
        if let Some(r) = self.r_values.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return bad(format!("R values must be positive, got {r}"));
        }
        if let Some(n) = self.sample_sizes.iter().chain(&self.n2).find(|n| **n < 3) {
            return bad(format!("sample sizes must be at least 3, got {n}"));
        }
        if !(self.theta2.is_finite() && self.theta2 > 0.0) {
            return bad(format!("theta2 must be positive, got {}", self.theta2));
        }
        Ok(())
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            lambda_uses_corrected_ratio: self.lambda_uses_corrected_ratio,
        }
    }

    fn second_size(&self, n: usize) -> usize {
        self.n2.unwrap_or(n)
    }
}

/// Monte Carlo summary of one estimator in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientStats {
    pub mean_estimate: f64,
    pub bias: f64,
    pub mse: f64,
    /// Population variance (divisor = replications), so `mse = variance + bias²`.
    pub variance: f64,
    pub std_dev: f64,
    /// `bias / std_dev`; 0 when the estimator is constant.
    pub ratio_bias_over_sigma: f64,
    /// `std_dev / √replications`
    pub mc_standard_error: f64,
    /// Standard error of `mse` as a mean of squared errors.
    pub mse_standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub r: f64,
    pub n1: usize,
    pub n2: usize,
    pub replications: usize,
    pub true_values: OverlapQuartet,
    pub stats: PerCoefficient<CoefficientStats>,
}

impl SimCell {
    /// Sample size labelling the cell (the first-sample size).
    pub fn n(&self) -> usize {
        self.n1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTable {
    pub config: SimConfig,
    /// Row-major over `r_values × sample_sizes`.
    pub cells: Vec<SimCell>,
}

impl SimulationTable {
    pub fn cell(&self, r: f64, n: usize) -> Option<&SimCell> {
        self.cells.iter().find(|c| c.r == r && c.n1 == n)
    }
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the generator for one cell; replications and populations select
/// nonces within it.
fn cell_seed(seed: u64, r: f64, n: usize) -> u64 {
    mix64(seed ^ mix64(r.to_bits() ^ mix64(n as u64 ^ 0xD134_2543_DE82_EF95)))
}

fn replication_stream(cell_seed: u64, replication: usize, population: u64) -> SeededStream {
    SeededStream::new(cell_seed, ((replication as u64) << 1) | population)
}

fn sample_mean(stream: &mut SeededStream, mean: f64, n: usize) -> f64 {
    (0..n).map(|_| stream.next_exponential(mean)).sum::<f64>() / n as f64
}

/// Runs one cell. `key_r` selects the random streams; `swap` draws the first
/// sample from the second population's streams and vice versa.
fn simulate_cell(cfg: &SimConfig, r: f64, n: usize, key_r: f64, swap: bool) -> Result<SimCell> {
    let ratio = RatioR::new(r)?;
    let n1 = n;
    let n2 = cfg.second_size(n);
    if n1 < 3 || n2 < 3 {
        return Err(Error::InsufficientSampleSize(format!("cell sizes ({n1}, {n2}) must be at least 3")));
    }
    let truth = quartet_of_r(ratio);
    let opts = cfg.estimator_options();
    let key = cell_seed(cfg.seed, key_r, n);
    let (pop1, pop2) = if swap { (1, 0) } else { (0, 1) };
    let mean1 = r * cfg.theta2;
    let mean2 = cfg.theta2;

    let errors: Vec<[f64; 4]> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| -> Result<[f64; 4]> {
            let t1 = sample_mean(&mut replication_stream(key, rep, pop1), mean1, n1);
            let t2 = sample_mean(&mut replication_stream(key, rep, pop2), mean2, n2);
            let est = ovl_point_estimates(&RatioEstimates::from_thetas(t1, t2, n1, n2), opts)?;
            Ok(Coefficient::ALL.map(|c| est.get(c) - truth.get(c)))
        })
        .collect::<Result<_>>()?;

    let stats = PerCoefficient::from_fn(|c| {
        let idx = Coefficient::ALL.iter().position(|&k| k == c).expect("known coefficient");
        summarize(errors.iter().map(|e| e[idx]), cfg.replications, *truth.get(c))
    });

    Ok(SimCell {
        r,
        n1,
        n2,
        replications: cfg.replications,
        true_values: truth,
        stats,
    })
}

fn summarize(errors: impl Iterator<Item = f64> + Clone, count: usize, truth: f64) -> CoefficientStats {
    let n = count as f64;
    let bias = errors.clone().sum::<f64>() / n;
    let mse = errors.clone().map(|e| e * e).sum::<f64>() / n;
    let variance = errors.clone().map(|e| (e - bias) * (e - bias)).sum::<f64>() / n;
    let sq_spread = errors.map(|e| (e * e - mse).powi(2)).sum::<f64>() / n;
    let std_dev = variance.sqrt();
    CoefficientStats {
        mean_estimate: truth + bias,
        bias,
        mse,
        variance,
        std_dev,
        ratio_bias_over_sigma: if std_dev > 0.0 { bias / std_dev } else { 0.0 },
        mc_standard_error: std_dev / n.sqrt(),
        mse_standard_error: sq_spread.sqrt() / n.sqrt(),
    }
}

/// Monte Carlo bias, MSE and Bias/σ of the four estimators at one `(R, n)`.
pub fn run_cell(cfg: &SimConfig, r: f64, n: usize) -> Result<SimCell> {
    cfg.validate()?;
    simulate_cell(cfg, r, n, r, false)
}

/// Runs every cell of the configured grid.
pub fn run_study(cfg: &SimConfig) -> Result<SimulationTable> {
    cfg.validate()?;
    let mut cells = Vec::with_capacity(cfg.r_values.len() * cfg.sample_sizes.len());
    for &r in &cfg.r_values {
        for &n in &cfg.sample_sizes {
            cells.push(simulate_cell(cfg, r, n, r, false)?);
        }
    }
    Ok(SimulationTable {
        config: cfg.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(reps: usize) -> SimConfig {
        SimConfig {
            r_values: vec![0.5],
            sample_sizes: vec![20],
            replications: reps,
            ..SimConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let bad = [
            SimConfig { replications: 1, ..SimConfig::default() },
            SimConfig { r_values: vec![0.5, -1.0], ..SimConfig::default() },
            SimConfig { sample_sizes: vec![2], ..SimConfig::default() },
            SimConfig { n2: Some(2), ..SimConfig::default() },
            SimConfig { theta2: 0.0, ..SimConfig::default() },
            SimConfig { r_values: vec![], ..SimConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn mse_identity_and_ratio() {
        let cell = run_cell(&small(500), 0.5, 20).unwrap();
        for (_, s) in cell.stats.iter() {
            let rebuilt = s.variance + s.bias * s.bias;
            assert!((s.mse - rebuilt).abs() <= 1e-12 * s.mse);
            assert!((s.ratio_bias_over_sigma - s.bias / s.std_dev).abs() < 1e-15);
            assert!((s.mc_standard_error - s.std_dev / 500f64.sqrt()).abs() < 1e-15);
            assert!(s.mse >= s.bias * s.bias - 1e-15);
        }
    }

    #[test]
    fn cell_is_reproducible() {
        let cfg = small(200);
        assert_eq!(run_cell(&cfg, 0.5, 20).unwrap(), run_cell(&cfg, 0.5, 20).unwrap());
        let other = SimConfig { seed: cfg.seed + 1, ..cfg.clone() };
        assert_ne!(run_cell(&cfg, 0.5, 20).unwrap(), run_cell(&other, 0.5, 20).unwrap());
    }

    #[test]
    fn study_cell_equals_standalone_cell() {
        let cfg = SimConfig {
            r_values: vec![0.2, 0.5],
            sample_sizes: vec![20, 50],
            replications: 100,
            ..SimConfig::default()
        };
        let table = run_study(&cfg).unwrap();
        assert_eq!(table.cells.len(), 4);
        assert_eq!(table.cell(0.5, 50).unwrap(), &run_cell(&cfg, 0.5, 50).unwrap());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small(300);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_study(&cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn swapped_reciprocal_cell_inverts_the_ratio() {
        // Same streams, populations swapped: R̂ of the 1/R cell is 1/R̂ of the R
        // cell, so the uncorrected Λ̂ errors coincide up to rounding.
        let cfg = small(200);
        let direct = simulate_cell(&cfg, 0.5, 20, 0.5, false).unwrap();
        let mirrored = simulate_cell(&cfg, 2.0, 20, 0.5, true).unwrap();
        for c in Coefficient::ALL {
            assert!((direct.true_values.get(c) - mirrored.true_values.get(c)).abs() <= 1e-12);
        }
        assert!((direct.stats.kl_lambda.bias - mirrored.stats.kl_lambda.bias).abs() < 1e-12);
    }

    #[test]
    fn unequal_sizes() {
        let cfg = SimConfig { n2: Some(30), ..small(50) };
        let cell = run_cell(&cfg, 0.5, 20).unwrap();
        assert_eq!((cell.n1, cell.n2), (20, 30));
    }
}
