//! Seeded sampling and the F distribution.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};

const BETA_MAX_ITER: usize = 500;
const BETA_EPS: f64 = 1e-16;
const LENTZ_TINY: f64 = 1e-300;

const QUANTILE_LO: f64 = 1e-12;
const QUANTILE_HI: f64 = 1e12;
const QUANTILE_CDF_TOL: f64 = 1e-10;

/// 2⁻⁵³
const UNIT: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Independent random substream keyed by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the seed expanded into the key and `stream_id`
/// selecting the cipher nonce, so every substream is a separate counter-mode
/// sequence. Output is identical on every platform.
#[derive(Debug, Clone)]
pub struct SeededStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform variate on the open interval (0, 1): `(k + ½)·2⁻⁵³`.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * UNIT
    }

    /// One exponential variate with the given mean, by inversion.
    pub fn next_exponential(&mut self, mean: f64) -> f64 {
        -mean * self.next_open01().ln()
    }
}

/// Draws `n` i.i.d. variates with density `(1/θ) e^{−x/θ}`.
pub fn sample_exponential(stream: &mut SeededStream, mean_theta: f64, n: usize) -> Result<Vec<f64>> {
    if !(mean_theta.is_finite() && mean_theta > 0.0) {
        return Err(Error::InvalidArgument(format!("exponential mean must be positive, got {mean_theta}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    Ok((0..n).map(|_| stream.next_exponential(mean_theta)).collect())
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta shape parameters must be positive, got ({a}, {b})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("incomplete beta argument must lie in [0, 1], got {x}")));
    }
    incomplete_beta_split(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` given both `x` and `1 − x`, so callers that know the
/// complement exactly do not lose it to cancellation.
fn incomplete_beta_split(a: f64, b: f64, x: f64, one_minus_x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if one_minus_x <= 0.0 {
        return Ok(1.0);
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        Ok(1.0 - beta_continued_fraction(b, a, one_minus_x, x)?)
    } else {
        beta_continued_fraction(a, b, x, one_minus_x)
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64, one_minus_x: f64) -> Result<f64> {
    let log_prefix = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    let prefix = log_prefix.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let clamp = |v: f64| if v.abs() < LENTZ_TINY { LENTZ_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;

    for m in 1..=BETA_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let step = d * c;
        h *= step;

        if (step - 1.0).abs() < BETA_EPS {
            return Ok(prefix * h);
        }
    }
    Err(Error::NonConvergence("incomplete beta continued fraction"))
}

/// Degrees of freedom of an F distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FDistParams {
    pub d1: u64,
    pub d2: u64,
}

impl FDistParams {
    pub fn new(d1: u64, d2: u64) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument(format!("F degrees of freedom must be positive, got ({d1}, {d2})")));
        }
        Ok(Self { d1, d2 })
    }

    /// `F(d2, d1)`.
    pub fn swapped(self) -> Self {
        Self { d1: self.d2, d2: self.d1 }
    }

    fn halves(self) -> (f64, f64) {
        (self.d1 as f64 / 2.0, self.d2 as f64 / 2.0)
    }

    /// Beta argument `z = d1·x/(d1·x + d2)` and its complement.
    fn beta_argument(self, x: f64) -> (f64, f64) {
        let num = self.d1 as f64 * x;
        let den = num + self.d2 as f64;
        (num / den, self.d2 as f64 / den)
    }
}

/// Cumulative distribution function of `F(d1, d2)`.
pub fn f_cdf(p: FDistParams, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("F argument must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let (a, b) = p.halves();
    let (z, one_minus_z) = p.beta_argument(x);
    incomplete_beta_split(a, b, z, one_minus_z)
}

/// Density of `F(d1, d2)`.
pub fn f_pdf(p: FDistParams, x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return 0.0;
    }
    let (a, b) = p.halves();
    let (z, one_minus_z) = p.beta_argument(x);
    // dz/dx = d1·d2/(d1·x + d2)² = z·(1 − z)/x
    let log_beta_pdf = (a - 1.0) * z.ln() + (b - 1.0) * one_minus_z.ln() - ln_beta(a, b);
    (log_beta_pdf + z.ln() + one_minus_z.ln() - x.ln()).exp()
}

/// Quantile of `F(d1, d2)`: the `x` with `f_cdf(p, x) = prob`.
///
/// Brackets in log space, bisects the bracket down to a factor of two, then
/// polishes with safeguarded Newton steps.
pub fn f_quantile(p: FDistParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidArgument(format!("quantile probability must lie in (0, 1), got {prob}")));
    }

    let mut lo = QUANTILE_LO;
    let mut hi = QUANTILE_HI;
    for _ in 0..20 {
        if f_cdf(p, lo)? <= prob {
            break;
        }
        lo *= 1e-12;
    }
    for _ in 0..20 {
        if f_cdf(p, hi)? >= prob {
            break;
        }
        hi *= 1e12;
    }

    while hi / lo > 2.0 {
        let mid = (lo * hi).sqrt();
        if f_cdf(p, mid)? < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = (lo * hi).sqrt();
    for _ in 0..200 {
        let residual = f_cdf(p, x)? - prob;
        if residual == 0.0 {
            return Ok(x);
        }
        if residual < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let density = f_pdf(p, x);
        let newton = x - residual / density;
        let next = if density > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }

    if (f_cdf(p, x)? - prob).abs() <= QUANTILE_CDF_TOL {
        Ok(x)
    } else {
        Err(Error::NonConvergence("F quantile search"))
    }
}

/// Checks `F_q(d1, d2; prob) = 1 / F_q(d2, d1; 1 − prob)` to 1e−9 relative.
pub fn reciprocal_f_identity_check(p: FDistParams, prob: f64) -> bool {
    match (f_quantile(p, prob), f_quantile(p.swapped(), 1.0 - prob)) {
        (Ok(direct), Ok(mirrored)) => {
            let reciprocal = 1.0 / mirrored;
            ((direct - reciprocal) / direct).abs() <= 1e-9
        }
        _ => false,
    }
}
