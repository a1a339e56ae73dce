//! Point estimation of `R` and of the four coefficients from two samples,
//! with first-order (variance) and second-order (bias) Taylor approximations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{log_ratio_exponent, Coefficient, OverlapQuartet, PerCoefficient, RatioR};

/// Below this `|R − 1|` the Δ bias bracket uses its series expansion.
const DELTA_BIAS_SERIES_BAND: f64 = 1e-3;

/// Relative step of the finite-difference bias oracle.
const ORACLE_STEP: f64 = 1e-5;

/// Two independent samples of strictly positive observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSample {
    x1: Vec<f64>,
    x2: Vec<f64>,
}

impl TwoSample {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        for (sample, xs) in [(1, &x1), (2, &x2)] {
            if xs.is_empty() {
                return Err(Error::EmptySample(sample));
            }
            if let Some((index, &value)) = xs.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::NonPositiveObservation { sample, index, value });
            }
        }
        Ok(Self { x1, x2 })
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn n1(&self) -> usize {
        self.x1.len()
    }

    pub fn n2(&self) -> usize {
        self.x2.len()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Maximum-likelihood estimates of the two exponential means: the sample means.
pub fn mle_thetas(s: &TwoSample) -> (f64, f64) {
    (mean(&s.x1), mean(&s.x2))
}

/// `c = (n₁ + n₂ − 1) / (n₁(n₂ − 2))`, so that `Var(R̂*) = R²·c`.
pub fn variance_factor(n1: usize, n2: usize) -> Result<f64> {
    if n1 == 0 {
        return Err(Error::InsufficientSampleSize("n1 must be at least 1".into()));
    }
    if n2 <= 2 {
        return Err(Error::InsufficientSampleSize(format!("n2 must exceed 2, got {n2}")));
    }
    let (n1, n2) = (n1 as f64, n2 as f64);
    Ok((n1 + n2 - 1.0) / (n1 * (n2 - 2.0)))
}

/// Ratio estimators derived from the two MLEs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimates {
    pub n1: usize,
    pub n2: usize,
    pub theta1_hat: f64,
    pub theta2_hat: f64,
    /// `θ̂₁/θ̂₂`
    pub r_hat: f64,
    /// `R̂·(n₂ − 1)/n₂`, unbiased for `R`.
    pub r_hat_star: f64,
    /// Plug-in `Var(R̂*)`; `None` when `n₂ ≤ 2`.
    pub var_r_hat_star: Option<f64>,
}

impl RatioEstimates {
    pub fn from_thetas(theta1_hat: f64, theta2_hat: f64, n1: usize, n2: usize) -> Self {
        let r_hat = theta1_hat / theta2_hat;
        let r_hat_star = r_hat * (n2 as f64 - 1.0) / n2 as f64;
        let var_r_hat_star = variance_factor(n1, n2).ok().map(|c| r_hat_star * r_hat_star * c);
        Self {
            n1,
            n2,
            theta1_hat,
            theta2_hat,
            r_hat,
            r_hat_star,
            var_r_hat_star,
        }
    }

    pub fn ratio(&self) -> Result<RatioR> {
        RatioR::new(self.r_hat)
    }

    pub fn corrected_ratio(&self) -> Result<RatioR> {
        RatioR::new(self.r_hat_star)
    }

    /// Plug-in `Var(R̂*)`, or `InsufficientSampleSize` when `n₂ ≤ 2`.
    pub fn variance(&self) -> Result<f64> {
        self.var_r_hat_star
            .ok_or_else(|| Error::InsufficientSampleSize(format!("Var(R*) needs n2 > 2, got {}", self.n2)))
    }
}

pub fn ratio_estimates(s: &TwoSample) -> RatioEstimates {
    let (t1, t2) = mle_thetas(s);
    RatioEstimates::from_thetas(t1, t2, s.n1(), s.n2())
}

/// Estimator conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Evaluate Λ̂ at `R̂*` like the other three coefficients. Off by default,
    /// which evaluates Λ̂ at the uncorrected `R̂`.
    pub lambda_uses_corrected_ratio: bool,
}

impl EstimatorOptions {
    /// The ratio estimate fed to the closed form of `which`.
    pub fn argument_for(&self, which: Coefficient, re: &RatioEstimates) -> f64 {
        match which {
            Coefficient::KlLambda if !self.lambda_uses_corrected_ratio => re.r_hat,
            _ => re.r_hat_star,
        }
    }
}

/// Plug-in point estimates: Δ̂, ρ̂, λ̂ at `R̂*`, Λ̂ at `R̂` unless the options
/// say otherwise.
pub fn ovl_point_estimates(re: &RatioEstimates, opts: EstimatorOptions) -> Result<OverlapQuartet> {
    OverlapQuartet::try_from_fn(|c| Ok(c.of_r(RatioR::new(opts.argument_for(c, re))?)))
}

/// First-order Taylor variances of the four estimators at the true `r`.
///
/// At `R = 1` the Δ variance takes its limit `c·e⁻²`; the other three vanish.
pub fn taylor_variances(r: RatioR, n1: usize, n2: usize) -> Result<PerCoefficient<f64>> {
    let c = variance_factor(n1, n2)?;
    let r = r.value();
    let one_minus = 1.0 - r;
    let exponent = log_ratio_exponent(r);
    let q = r * r - r + 1.0;

    Ok(PerCoefficient {
        // R^{2/(1−R)} (ln R)² / (1 − R)²
        delta: c * (2.0 * exponent).exp() * exponent * exponent,
        rho: c * r * one_minus * one_minus / (1.0 + r).powi(4),
        lambda: c * 16.0 * r * r * one_minus * one_minus / (1.0 + r).powi(6),
        kl_lambda: c * r * r * (1.0 - r * r).powi(2) / q.powi(4),
    })
}

/// `[R(2R − ln R − 2) ln R − (R − 1)²] / (R − 1)³`, continuous at `R = 1`.
fn delta_bias_bracket(r: f64) -> f64 {
    let u = r - 1.0;
    if u.abs() < DELTA_BIAS_SERIES_BAND {
        1.0 - u / 4.0 + u * u / 12.0 - u * u * u / 36.0
    } else {
        let ln_r = r.ln();
        (r * (2.0 * r - ln_r - 2.0) * ln_r - u * u) / (u * u * u)
    }
}

/// Second-order Taylor biases in the closed forms used by the study's
/// reference table.
///
/// The Δ expression is piecewise: the `R < 1` branch divides by `(1 − R)³`
/// instead of `(R − 1)³`, so the two one-sided limits at `R = 1` have opposite
/// signs and the Δ entry is `None` there. The other entries are always `Some`.
pub fn taylor_biases(r: RatioR, n1: usize, n2: usize) -> Result<PerCoefficient<Option<f64>>> {
    let c = variance_factor(n1, n2)?;
    let r = r.value();
    let q = r * r - r + 1.0;

    let delta = if r == 1.0 {
        None
    } else {
        let sign = if r > 1.0 { 1.0 } else { -1.0 };
        let power = ((2.0 * r - 1.0) * log_ratio_exponent(r)).exp();
        Some(sign * c * r * r * power * delta_bias_bracket(r))
    };

    Ok(PerCoefficient {
        delta,
        rho: Some(c * r.sqrt() * (3.0 * r * (r - 2.0) - 1.0) / (2.0 * (r + 1.0).powi(3))),
        lambda: Some(c * 8.0 * r * r * (r - 2.0) / (r + 1.0).powi(4)),
        kl_lambda: Some(-c * r * r * (2.0 * r.powi(3) - 6.0 * r + 2.0) / q.powi(3)),
    })
}

/// Second-order delta-method bias `½ g″(R) Var(R̂*)` with `g″` taken by a
/// central finite difference of the closed forms.
///
/// Δ has a kink at `R = 1`; its entry is `None` when the stencil straddles it.
pub fn taylor_bias_oracle(r: RatioR, n1: usize, n2: usize) -> Result<PerCoefficient<Option<f64>>> {
    let c = variance_factor(n1, n2)?;
    let x = r.value();
    let mut h = ORACLE_STEP * x.max(1.0);
    if h >= x {
        h = x * 1e-3;
    }
    let variance = x * x * c;

    Ok(PerCoefficient::from_fn(|which| {
        if which == Coefficient::Delta && x - h <= 1.0 && 1.0 <= x + h {
            return None;
        }
        let g = |v: f64| which.of_r(RatioR::new(v).expect("stencil stays positive"));
        let second = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
        Some(0.5 * second * variance)
    }))
}

/// Point estimate with plug-in approximate variance and bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub point: f64,
    pub approx_variance: f64,
    /// `None` only for Δ when `R̂* = 1` exactly.
    pub approx_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n1: usize,
    pub n2: usize,
    pub ratio: RatioEstimates,
    pub options: EstimatorOptions,
    pub coefficients: PerCoefficient<CoefficientEstimate>,
}

/// Point estimates plus variances and biases evaluated at `R̂*`.
pub fn estimate_report(s: &TwoSample, opts: EstimatorOptions) -> Result<EstimateReport> {
    let ratio = ratio_estimates(s);
    ratio.variance()?;
    let plug_in = ratio.corrected_ratio()?;
    let points = ovl_point_estimates(&ratio, opts)?;
    let variances = taylor_variances(plug_in, s.n1(), s.n2())?;
    let biases = taylor_biases(plug_in, s.n1(), s.n2())?;

    Ok(EstimateReport {
        n1: s.n1(),
        n2: s.n2(),
        ratio,
        options: opts,
        coefficients: PerCoefficient::from_fn(|c| CoefficientEstimate {
            point: *points.get(c),
            approx_variance: *variances.get(c),
            approx_bias: *biases.get(c),
        }),
    })
}
