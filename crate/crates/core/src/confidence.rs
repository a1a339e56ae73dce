//! Exact interval for `R` from the pivot `R̂/R ~ F(2n₁, 2n₂)` and its image
//! under each overlap coefficient.

use serde::{Deserialize, Serialize};

use crate::distributions::{f_quantile, FDistParams};
use crate::error::{Error, Result};
use crate::estimation::RatioEstimates;
use crate::measures::{Coefficient, RatioR};

/// What a [`ConfidenceInterval`] bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiTarget {
    Ratio,
    Overlap(Coefficient),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub target: CiTarget,
    /// The ratio interval encloses 1. For coefficient intervals the upper
    /// limit is then pinned at 1.
    pub contains_one: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("confidence level must lie in (0, 1), got {level}")))
    }
}

/// `(R̂ / F_{1−α/2}, R̂ / F_{α/2})` with quantiles of `F(2n₁, 2n₂)`.
pub fn ratio_ci(re: &RatioEstimates, level: f64) -> Result<ConfidenceInterval> {
    check_level(level)?;
    RatioR::new(re.r_hat)?;
    let alpha = 1.0 - level;
    let law = FDistParams::new(2 * re.n1 as u64, 2 * re.n2 as u64)?;
    let upper_q = f_quantile(law, 1.0 - alpha / 2.0)?;
    let lower_q = f_quantile(law, alpha / 2.0)?;
    let lower = re.r_hat / upper_q;
    let upper = re.r_hat / lower_q;
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        target: CiTarget::Ratio,
        contains_one: lower < 1.0 && 1.0 < upper,
    })
}

/// Maps a ratio interval through the closed form of `which`.
///
/// Every coefficient increases on `(0, 1]` and decreases on `[1, ∞)`, so the
/// image of `[L, U]` is `[OVL(L), OVL(U)]` below 1, `[OVL(U), OVL(L)]` above 1,
/// and `[min(OVL(L), OVL(U)), 1]` when the interval straddles 1.
pub fn ovl_ci(ci_r: &ConfidenceInterval, which: Coefficient) -> Result<ConfidenceInterval> {
    if ci_r.target != CiTarget::Ratio {
        return Err(Error::InvalidInterval("expected an interval for the ratio R".into()));
    }
    if !(ci_r.lower > 0.0 && ci_r.lower <= ci_r.upper && ci_r.upper.is_finite()) {
        return Err(Error::InvalidInterval(format!("({}, {})", ci_r.lower, ci_r.upper)));
    }
    let at_lower = which.of_r(RatioR::new(ci_r.lower)?);
    let at_upper = which.of_r(RatioR::new(ci_r.upper)?);

    let (lower, upper, contains_one) = if ci_r.upper <= 1.0 {
        (at_lower, at_upper, false)
    } else if ci_r.lower >= 1.0 {
        (at_upper, at_lower, false)
    } else {
        (at_lower.min(at_upper), 1.0, true)
    };

    Ok(ConfidenceInterval {
        lower,
        upper,
        level: ci_r.level,
        target: CiTarget::Overlap(which),
        contains_one,
    })
}

/// Ratio interval plus the four coefficient intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub ratio: ConfidenceInterval,
    pub overlaps: crate::measures::PerCoefficient<ConfidenceInterval>,
}

pub fn interval_report(re: &RatioEstimates, level: f64) -> Result<IntervalReport> {
    let ratio = ratio_ci(re, level)?;
    let overlaps = crate::measures::PerCoefficient::try_from_fn(|c| ovl_ci(&ratio, c))?;
    Ok(IntervalReport { ratio, overlaps })
}
