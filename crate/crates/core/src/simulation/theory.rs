//! Approximation formulas against Monte Carlo output, cell by cell.

use serde::{Deserialize, Serialize};

use super::{run_study, SimConfig, SimulationTable};
use crate::error::Result;
use crate::estimation::{taylor_bias_oracle, taylor_biases, taylor_variances};
use crate::measures::{Coefficient, RatioR};

/// Which bias approximation lies closer to the Monte Carlo bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasVerdict {
    /// The closed-form bias expressions.
    Verbatim,
    /// `½ g″(R) Var(R̂*)` by finite differences.
    Oracle,
    /// One of the two is undefined at this cell.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub r: f64,
    pub n1: usize,
    pub n2: usize,
    pub coefficient: Coefficient,
    pub empirical_variance: f64,
    pub theory_variance: f64,
    /// `(theory − empirical) / empirical`
    pub variance_rel_error: f64,
    pub empirical_bias: f64,
    pub mc_standard_error: f64,
    pub verbatim_bias: Option<f64>,
    pub oracle_bias: Option<f64>,
    pub verbatim_abs_error: Option<f64>,
    pub oracle_abs_error: Option<f64>,
    pub closer: BiasVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub lambda_uses_corrected_ratio: bool,
    pub rows: Vec<TheoryRow>,
    pub verbatim_closer: usize,
    pub oracle_closer: usize,
    pub undetermined: usize,
}

/// Tabulates first-order variances and both bias approximations against the
/// Monte Carlo values of `table`.
pub fn theory_report(table: &SimulationTable) -> Result<TheoryReport> {
    let mut rows = Vec::with_capacity(table.cells.len() * 4);
    for cell in &table.cells {
        let r = RatioR::new(cell.r)?;
        let variances = taylor_variances(r, cell.n1, cell.n2)?;
        let verbatim = taylor_biases(r, cell.n1, cell.n2)?;
        let oracle = taylor_bias_oracle(r, cell.n1, cell.n2)?;
        for c in Coefficient::ALL {
            let stats = cell.stats.get(c);
            let theory_variance = *variances.get(c);
            let verbatim_bias = *verbatim.get(c);
            let oracle_bias = *oracle.get(c);
            let verbatim_abs_error = verbatim_bias.map(|b| (b - stats.bias).abs());
            let oracle_abs_error = oracle_bias.map(|b| (b - stats.bias).abs());
            let closer = match (verbatim_abs_error, oracle_abs_error) {
                (Some(v), Some(o)) if o < v => BiasVerdict::Oracle,
                (Some(v), Some(o)) if v < o => BiasVerdict::Verbatim,
                _ => BiasVerdict::Undetermined,
            };
            rows.push(TheoryRow {
                r: cell.r,
                n1: cell.n1,
                n2: cell.n2,
                coefficient: c,
                empirical_variance: stats.variance,
                theory_variance,
                variance_rel_error: (theory_variance - stats.variance) / stats.variance,
                empirical_bias: stats.bias,
                mc_standard_error: stats.mc_standard_error,
                verbatim_bias,
                oracle_bias,
                verbatim_abs_error,
                oracle_abs_error,
                closer,
            });
        }
    }
    let count = |v| rows.iter().filter(|r| r.closer == v).count();
    Ok(TheoryReport {
        lambda_uses_corrected_ratio: table.config.lambda_uses_corrected_ratio,
        verbatim_closer: count(BiasVerdict::Verbatim),
        oracle_closer: count(BiasVerdict::Oracle),
        undetermined: count(BiasVerdict::Undetermined),
        rows,
    })
}

/// Runs the study for `cfg` and reports theory against simulation.
pub fn theoretical_vs_empirical(cfg: &SimConfig) -> Result<TheoryReport> {
    theory_report(&run_study(cfg)?)
}

impl TheoryReport {
    pub fn row(&self, r: f64, n: usize, coefficient: Coefficient) -> Option<&TheoryRow> {
        self.rows.iter().find(|x| x.r == r && x.n1 == n && x.coefficient == coefficient)
    }
}
