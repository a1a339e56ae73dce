//! Flat rows for the CSV outputs of the study.
//!
//! `TableRow` column order: r, n, coefficient, bias, mse, ratio, mc_se,
//! reference_bias, reference_mse, pass. `FigureRow` column order: n, r,
//! delta, rho, lambda, kl_lambda. Values are full precision.

use serde::{Deserialize, Serialize};

use super::compare::{ComparisonStatus, ReferenceComparison, Statistic};
use super::{CoefficientStats, SimulationTable};
use crate::measures::Coefficient;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub r: f64,
    pub n: usize,
    pub coefficient: Coefficient,
    pub bias: f64,
    pub mse: f64,
    pub ratio: f64,
    pub mc_se: f64,
    pub reference_bias: Option<f64>,
    pub reference_mse: Option<f64>,
    /// `pass`, `fail`, or `n/a` without a reference. Excluded entries do
    /// not count.
    pub pass: String,
}

/// One row per cell and coefficient.
pub fn table_rows(table: &SimulationTable, comparison: Option<&ReferenceComparison>) -> Vec<TableRow> {
    let mut rows = Vec::with_capacity(table.cells.len() * 4);
    for cell in &table.cells {
        for c in Coefficient::ALL {
            let s = cell.stats.get(c);
            let lookup = |stat| comparison.and_then(|cmp| cmp.entry(cell.r, cell.n1, c, stat));
            let (bias_cmp, mse_cmp) = (lookup(Statistic::Bias), lookup(Statistic::Mse));
            let pass = match (bias_cmp, mse_cmp) {
                (None, None) => "n/a",
                _ if [bias_cmp, mse_cmp].iter().flatten().any(|e| e.status == ComparisonStatus::Fail) => "fail",
                _ => "pass",
            };
            rows.push(TableRow {
                r: cell.r,
                n: cell.n1,
                coefficient: c,
                bias: s.bias,
                mse: s.mse,
                ratio: s.ratio_bias_over_sigma,
                mc_se: s.mc_standard_error,
                reference_bias: bias_cmp.map(|e| e.reference),
                reference_mse: mse_cmp.map(|e| e.reference),
                pass: pass.to_string(),
            });
        }
    }
    rows
}

/// The three per-R curves: bias, standard deviation and MSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    Bias,
    StdDev,
    Mse,
}

impl FigureKind {
    pub const ALL: [FigureKind; 3] = [Self::Bias, Self::StdDev, Self::Mse];

    pub fn file_stem(self) -> &'static str {
        match self {
            Self::Bias => "figure_bias",
            Self::StdDev => "figure_std_dev",
            Self::Mse => "figure_mse",
        }
    }

    fn pick(self, s: &CoefficientStats) -> f64 {
        match self {
            Self::Bias => s.bias,
            Self::StdDev => s.std_dev,
            Self::Mse => s.mse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub rho: f64,
    pub lambda: f64,
    pub kl_lambda: f64,
}

/// Rows grouped by `n`, then sorted by `R`, one series per coefficient.
pub fn figure_rows(table: &SimulationTable, kind: FigureKind) -> Vec<FigureRow> {
    let mut cells: Vec<_> = table.cells.iter().collect();
    cells.sort_by(|a, b| a.n1.cmp(&b.n1).then(a.r.total_cmp(&b.r)));
    cells
        .into_iter()
        .map(|cell| {
            let v = cell.stats.map(|_, s| kind.pick(s));
            FigureRow {
                n: cell.n1,
                r: cell.r,
                delta: v.delta,
                rho: v.rho,
                lambda: v.lambda,
                kl_lambda: v.kl_lambda,
            }
        })
        .collect()
}
