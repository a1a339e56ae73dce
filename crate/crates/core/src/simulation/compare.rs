//! Pass/fail comparison of a simulated table against the reference values.

use serde::{Deserialize, Serialize};

use super::reference::{reference_entries, REFERENCE_R_VALUES, REFERENCE_SAMPLE_SIZES};
use super::SimulationTable;
use crate::error::{Error, Result};
use crate::measures::Coefficient;

/// Absolute floor of the pass band.
pub const ABSOLUTE_TOLERANCE: f64 = 0.01;
/// Width of the pass band in Monte Carlo standard errors.
pub const STANDARD_ERRORS: f64 = 3.0;
/// Share of non-excluded comparisons that must pass.
pub const REQUIRED_PASS_RATE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Bias,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonStatus {
    Pass,
    Fail,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub r: f64,
    pub n: usize,
    pub coefficient: Coefficient,
    pub statistic: Statistic,
    pub empirical: f64,
    pub reference: f64,
    pub abs_diff: f64,
    /// `max(0.01, 3·SE)` with the standard error of this statistic.
    pub tolerance: f64,
    pub status: ComparisonStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceComparison {
    pub entries: Vec<CellComparison>,
    pub passed: usize,
    pub failed: usize,
    pub excluded: usize,
    pub pass_rate: f64,
    pub required_pass_rate: f64,
    pub reproduced: bool,
}

impl ReferenceComparison {
    pub fn entry(&self, r: f64, n: usize, coefficient: Coefficient, statistic: Statistic) -> Option<&CellComparison> {
        self.entries
            .iter()
            .find(|e| e.r == r && e.n == n && e.coefficient == coefficient && e.statistic == statistic)
    }
}

fn same_set<T: PartialOrd + Copy>(got: &[T], want: &[T]) -> bool {
    let sort = |xs: &[T]| {
        let mut v = xs.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("grid values are comparable"));
        v
    };
    sort(got) == sort(want)
}

/// Compares every bias and MSE entry of `t` with the reference table.
///
/// Fails with `GridMismatch` unless `t` covers exactly the reference grid
/// with equal sample sizes.
pub fn compare_to_reference(t: &SimulationTable) -> Result<ReferenceComparison> {
    let cfg = &t.config;
    if !same_set(&cfg.r_values, &REFERENCE_R_VALUES) {
        return Err(Error::GridMismatch(format!("R values {:?}", cfg.r_values)));
    }
    if !same_set(&cfg.sample_sizes, &REFERENCE_SAMPLE_SIZES) {
        return Err(Error::GridMismatch(format!("sample sizes {:?}", cfg.sample_sizes)));
    }
    if cfg.n2.is_some() {
        return Err(Error::GridMismatch("reference cells use equal sample sizes".into()));
    }

    let mut entries = Vec::with_capacity(120);
    for reference in reference_entries() {
        let cell = t
            .cell(reference.r, reference.n)
            .ok_or_else(|| Error::GridMismatch(format!("missing cell ({}, {})", reference.r, reference.n)))?;
        let stats = cell.stats.get(reference.coefficient);
        let rows = [
            (Statistic::Bias, stats.bias, reference.bias, stats.mc_standard_error, reference.bias_excluded),
            (Statistic::Mse, stats.mse, reference.mse, stats.mse_standard_error, false),
        ];
        for (statistic, empirical, expected, se, excluded) in rows {
            let abs_diff = (empirical - expected).abs();
            let tolerance = ABSOLUTE_TOLERANCE.max(STANDARD_ERRORS * se);
            let status = if excluded {
                ComparisonStatus::Excluded
            } else if abs_diff <= tolerance {
                ComparisonStatus::Pass
            } else {
                ComparisonStatus::Fail
            };
            entries.push(CellComparison {
                r: reference.r,
                n: reference.n,
                coefficient: reference.coefficient,
                statistic,
                empirical,
                reference: expected,
                abs_diff,
                tolerance,
                status,
            });
        }
    }

    let count = |s| entries.iter().filter(|e| e.status == s).count();
    let passed = count(ComparisonStatus::Pass);
    let failed = count(ComparisonStatus::Fail);
    let excluded = count(ComparisonStatus::Excluded);
    let pass_rate = passed as f64 / (passed + failed) as f64;
    Ok(ReferenceComparison {
        entries,
        passed,
        failed,
        excluded,
        pass_rate,
        required_pass_rate: REQUIRED_PASS_RATE,
        reproduced: pass_rate >= REQUIRED_PASS_RATE,
    })
}
