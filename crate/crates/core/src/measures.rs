//! Overlap coefficients of two exponential densities.
//!
//! The closed forms take only the ratio `R = θ₁/θ₂`. The quadrature oracle
//! ([`overlap_by_quadrature`]) integrates the defining expressions over the
//! densities themselves and never touches the closed forms, so the two can be
//! checked against each other.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};

/// Below this distance from 1 the exponent `ln R / (1 − R)` is replaced by its
/// Taylor series to avoid the 0/0 cancellation.
const SERIES_BAND: f64 = 1e-6;

/// Tail cutoff, in units of the slowest mean: every integrand is below
/// `e^{-TAIL_UNITS}` times a constant past `TAIL_UNITS / min_rate`.
const TAIL_UNITS: f64 = 50.0;

/// Strictly positive, finite ratio `θ₁/θ₂`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RatioR(f64);

impl RatioR {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidRatio(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn recip(self) -> Self {
        Self(1.0 / self.0)
    }
}

impl TryFrom<f64> for RatioR {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<RatioR> for f64 {
    fn from(r: RatioR) -> f64 {
        r.0
    }
}

impl fmt::Display for RatioR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The four overlap coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    /// Weitzman's Δ = ∫ min(f₁, f₂).
    Delta,
    /// Matusita's ρ = ∫ √(f₁ f₂).
    Rho,
    /// Morisita's λ = 2∫f₁f₂ / (∫f₁² + ∫f₂²).
    Lambda,
    /// Λ = 1 / (1 + J) with J the symmetric Kullback-Leibler divergence.
    KlLambda,
}

impl Coefficient {
    pub const ALL: [Coefficient; 4] = [Self::Delta, Self::Rho, Self::Lambda, Self::KlLambda];

    /// Stable machine name used in CSV/JSON output.
    pub fn name(self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::Rho => "rho",
            Self::Lambda => "lambda",
            Self::KlLambda => "kl_lambda",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Delta => "Δ",
            Self::Rho => "ρ",
            Self::Lambda => "λ",
            Self::KlLambda => "Λ",
        }
    }

    /// Closed form of this coefficient at `r`.
    pub fn of_r(self, r: RatioR) -> f64 {
        match self {
            Self::Delta => delta_of_r(r),
            Self::Rho => rho_of_r(r),
            Self::Lambda => lambda_of_r(r),
            Self::KlLambda => kl_lambda_of_r(r),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown coefficient `{s}`")))
    }
}

/// One value per coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerCoefficient<T> {
    pub delta: T,
    pub rho: T,
    pub lambda: T,
    pub kl_lambda: T,
}

impl<T> PerCoefficient<T> {
    pub fn from_fn(mut f: impl FnMut(Coefficient) -> T) -> Self {
        Self {
            delta: f(Coefficient::Delta),
            rho: f(Coefficient::Rho),
            lambda: f(Coefficient::Lambda),
            kl_lambda: f(Coefficient::KlLambda),
        }
    }

    pub fn try_from_fn<E>(mut f: impl FnMut(Coefficient) -> std::result::Result<T, E>) -> std::result::Result<Self, E> {
        Ok(Self {
            delta: f(Coefficient::Delta)?,
            rho: f(Coefficient::Rho)?,
            lambda: f(Coefficient::Lambda)?,
            kl_lambda: f(Coefficient::KlLambda)?,
        })
    }

    pub fn get(&self, which: Coefficient) -> &T {
        match which {
            Coefficient::Delta => &self.delta,
            Coefficient::Rho => &self.rho,
            Coefficient::Lambda => &self.lambda,
            Coefficient::KlLambda => &self.kl_lambda,
        }
    }

    pub fn get_mut(&mut self, which: Coefficient) -> &mut T {
        match which {
            Coefficient::Delta => &mut self.delta,
            Coefficient::Rho => &mut self.rho,
            Coefficient::Lambda => &mut self.lambda,
            Coefficient::KlLambda => &mut self.kl_lambda,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Coefficient, &T) -> U) -> PerCoefficient<U> {
        PerCoefficient::from_fn(|c| f(c, self.get(c)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coefficient, &T)> {
        Coefficient::ALL.into_iter().map(move |c| (c, self.get(c)))
    }
}

/// The four coefficient values (Δ, ρ, λ, Λ), each in [0, 1].
pub type OverlapQuartet = PerCoefficient<f64>;

/// How `theta1`/`theta2` of [`ExponentialParams`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// Density `θ e^{−θx}`.
    Rate,
    /// Density `(1/θ) e^{−x/θ}`.
    Mean,
}

/// Parameters of two exponential populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialParams {
    pub theta1: f64,
    pub theta2: f64,
    pub parameterization: Parameterization,
}

impl ExponentialParams {
    pub fn new(theta1: f64, theta2: f64, parameterization: Parameterization) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !(ok(theta1) && ok(theta2)) {
            return Err(Error::InvalidParameter(theta1, theta2));
        }
        Ok(Self {
            theta1,
            theta2,
            parameterization,
        })
    }

    pub fn with_means(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(theta1, theta2, Parameterization::Mean)
    }

    pub fn with_rates(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(theta1, theta2, Parameterization::Rate)
    }

    /// `θ₁/θ₂` in whichever parameterization was given. The coefficients
    /// are invariant under `R ↦ 1/R`, so both readings give the same values.
    pub fn ratio(&self) -> RatioR {
        RatioR(self.theta1 / self.theta2)
    }

    pub fn rates(&self) -> (f64, f64) {
        match self.parameterization {
            Parameterization::Rate => (self.theta1, self.theta2),
            Parameterization::Mean => (1.0 / self.theta1, 1.0 / self.theta2),
        }
    }

    pub fn means(&self) -> (f64, f64) {
        match self.parameterization {
            Parameterization::Rate => (1.0 / self.theta1, 1.0 / self.theta2),
            Parameterization::Mean => (self.theta1, self.theta2),
        }
    }
}

/// `ln R / (1 − R)`, continuous through `R = 1` where it equals −1.
pub(crate) fn log_ratio_exponent(r: f64) -> f64 {
    let u = r - 1.0;
    if u.abs() < SERIES_BAND {
        -1.0 + u / 2.0 - u * u / 3.0
    } else {
        // ln R rather than ln_1p(R − 1): R − 1 is inexact for tiny R
        r.ln() / -u
    }
}

/// Weitzman's Δ = 1 − |1 − 1/R| · R^{1/(1−R)}, equal to 1 at `R = 1`.
pub fn delta_of_r(r: RatioR) -> f64 {
    let r = r.0;
    if r == 1.0 {
        return 1.0;
    }
    1.0 - ((r - 1.0).abs() / r) * log_ratio_exponent(r).exp()
}

/// Matusita's ρ = 2√R / (1 + R).
pub fn rho_of_r(r: RatioR) -> f64 {
    let r = r.0;
    2.0 * r.sqrt() / (1.0 + r)
}

/// Morisita's λ = 4R / (1 + R)².
pub fn lambda_of_r(r: RatioR) -> f64 {
    let r = r.0;
    4.0 * r / ((1.0 + r) * (1.0 + r))
}

/// Λ = R / (R² − R + 1). The denominator is at least 3/4.
pub fn kl_lambda_of_r(r: RatioR) -> f64 {
    let r = r.0;
    r / (r * r - r + 1.0)
}

pub fn quartet_of_r(r: RatioR) -> OverlapQuartet {
    OverlapQuartet::from_fn(|c| c.of_r(r))
}

/// Symmetric Kullback-Leibler divergence `∫(f₁ − f₂) ln(f₁/f₂)` of two
/// exponentials, `(R − 1)²/R`.
pub fn symmetric_kl_exponential(p: &ExponentialParams) -> f64 {
    let r = p.ratio().value();
    (r - 1.0) * (r - 1.0) / r
}

/// Numerically integrates the defining expression of `which` over the two
/// densities on `[0, 50/min(rate₁, rate₂)]`.
pub fn overlap_by_quadrature(p: &ExponentialParams, which: Coefficient) -> Result<f64> {
    let (rate1, rate2) = p.rates();
    let upper = TAIL_UNITS / rate1.min(rate2);
    let (ln_rate1, ln_rate2) = (rate1.ln(), rate2.ln());
    let log_f1 = move |x: f64| ln_rate1 - rate1 * x;
    let log_f2 = move |x: f64| ln_rate2 - rate2 * x;
    let cfg = QuadConfig::default();
    let quad = |g: &dyn Fn(f64) -> f64| integrate(g, 0.0, upper, cfg).map(|i| i.value);

    let value = match which {
        Coefficient::Delta => {
            // split at the crossing point, where the integrand has a kink
            let g = |x: f64| log_f1(x).min(log_f2(x)).exp();
            if rate1 == rate2 {
                quad(&g)?
            } else {
                let cross = (ln_rate1 - ln_rate2) / (rate1 - rate2);
                integrate(g, 0.0, cross, cfg)?.value + integrate(g, cross, upper, cfg)?.value
            }
        }
        Coefficient::Rho => quad(&|x| (0.5 * (log_f1(x) + log_f2(x))).exp())?,
        Coefficient::Lambda => {
            let cross = quad(&|x| (log_f1(x) + log_f2(x)).exp())?;
            let own1 = quad(&|x| (2.0 * log_f1(x)).exp())?;
            let own2 = quad(&|x| (2.0 * log_f2(x)).exp())?;
            2.0 * cross / (own1 + own2)
        }
        Coefficient::KlLambda => {
            let divergence = quad(&|x| {
                let (l1, l2) = (log_f1(x), log_f2(x));
                (l1.exp() - l2.exp()) * (l1 - l2)
            })?;
            1.0 / (1.0 + divergence)
        }
    };
    Ok(value)
}

/// Quadrature oracle for all four coefficients.
pub fn quartet_by_quadrature(p: &ExponentialParams) -> Result<OverlapQuartet> {
    OverlapQuartet::try_from_fn(|c| overlap_by_quadrature(p, c))
}
