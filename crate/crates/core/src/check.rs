//! Self-check suites behind the command-line `check` command.
//!
//! Each suite returns a [`SuiteVerdict`] with its individual failures. All
//! randomness is seeded, so verdicts are reproducible.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::distributions::{f_cdf, f_quantile, reciprocal_f_identity_check, FDistParams, SeededStream};
use crate::error::Result;
use crate::measures::{overlap_by_quadrature, Coefficient, ExponentialParams, RatioR};

/// Default seed of the randomized suites.
pub const CHECK_SEED: u64 = 7_919;

/// Options for [`run_checks`]. `rho_perturbation` is a test hook added to
/// the closed form of ρ before it is compared with anything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub seed: u64,
    pub rho_perturbation: f64,
    /// Replications for the distribution-law suite; 0 selects the default.
    pub law_replications: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: CHECK_SEED,
            rho_perturbation: 0.0,
            law_replications: 0,
        }
    }
}

const DEFAULT_LAW_REPLICATIONS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteVerdict {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suites: Vec<SuiteVerdict>,
    pub passed: bool,
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> SuiteVerdict {
        SuiteVerdict {
            name: self.name.to_string(),
            passed: self.failures.is_empty(),
            checks: self.checks,
            failures: self.failures,
        }
    }
}

fn closed_form(which: Coefficient, r: RatioR, opts: &CheckOptions) -> f64 {
    let v = which.of_r(r);
    if which == Coefficient::Rho {
        v + opts.rho_perturbation
    } else {
        v
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Closed forms against the quadrature oracle on 50 log-spaced ratios in
/// `[0.05, 20]`, tolerance 1e-6.
pub fn oracle_suite(opts: &CheckOptions) -> Result<SuiteVerdict> {
    let mut s = Suite::new("oracle_equivalence");
    for r in log_grid(0.05, 20.0, 50) {
        let p = ExponentialParams::with_means(r, 1.0)?;
        for c in Coefficient::ALL {
            let exact = closed_form(c, p.ratio(), opts);
            let numeric = overlap_by_quadrature(&p, c)?;
            s.expect((exact - numeric).abs() <= 1e-6, || {
                format!("{} at R = {r}: closed form {exact}, quadrature {numeric}", c.name())
            });
        }
    }
    Ok(s.finish())
}

/// Range, unity at 1, reciprocity and piecewise monotonicity on a grid of
/// 1000 ratios in `[1e-3, 1e3]`.
pub fn shape_suite(opts: &CheckOptions) -> Result<SuiteVerdict> {
    let mut s = Suite::new("range_reciprocity_monotonicity");
    let grid = log_grid(1e-3, 1e3, 1000);
    for c in Coefficient::ALL {
        let at_one = closed_form(c, RatioR::new(1.0)?, opts);
        s.expect(at_one == 1.0, || format!("{} at R = 1 is {at_one}", c.name()));

        let values = grid
            .iter()
            .map(|&r| RatioR::new(r).map(|r| closed_form(c, r, opts)))
            .collect::<Result<Vec<_>>>()?;
        for (&r, &v) in grid.iter().zip(&values) {
            s.expect((0.0..=1.0).contains(&v), || format!("{} at R = {r} is {v}", c.name()));
            let mirror = closed_form(c, RatioR::new(1.0 / r)?, opts);
            s.expect((v - mirror).abs() <= 1e-12, || {
                format!("{} reciprocity at R = {r}: {v} vs {mirror}", c.name())
            });
        }
        for (w, pair) in grid.windows(2).zip(values.windows(2)) {
            let ok = if w[1] < 1.0 {
                pair[1] > pair[0]
            } else if w[0] > 1.0 {
                pair[1] < pair[0]
            } else {
                true
            };
            s.expect(ok, || format!("{} not monotone on [{}, {}]", c.name(), w[0], w[1]));
        }
    }
    Ok(s.finish())
}

/// `f_cdf(f_quantile(p))` round trips on 100 seeded cases, the tabulated
/// F₀.₉₇₅(20, 20) and the reciprocal quantile identity.
pub fn quantile_suite(opts: &CheckOptions) -> Result<SuiteVerdict> {
    let mut s = Suite::new("quantile_round_trip");
    let mut stream = SeededStream::new(opts.seed, 1);
    for _ in 0..100 {
        let d1 = 1 + stream.next_u64() % 200;
        let d2 = 1 + stream.next_u64() % 200;
        let prob = 0.001 + 0.998 * stream.next_open01();
        let law = FDistParams::new(d1, d2)?;
        let x = f_quantile(law, prob)?;
        let back = f_cdf(law, x)?;
        s.expect((back - prob).abs() <= 1e-10, || {
            format!("F({d1}, {d2}) at p = {prob}: cdf(quantile) = {back}")
        });
        s.expect(reciprocal_f_identity_check(law, prob), || {
            format!("reciprocal identity for F({d1}, {d2}) at p = {prob}")
        });
    }
    let q = f_quantile(FDistParams::new(20, 20)?, 0.975)?;
    s.expect((q - 2.4645).abs() <= 5e-4, || format!("F_0.975(20, 20) = {q}"));
    Ok(s.finish())
}

/// Kolmogorov-Smirnov statistic of `sample` against `cdf`. Sorts in place.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// KS tests of `θ̂ ~ Gamma(n, θ/n)` and `R̂/R ~ F(2n, 2n)` with n = 20.
pub fn distribution_suite(opts: &CheckOptions) -> Result<SuiteVerdict> {
    let mut s = Suite::new("distribution_laws");
    let reps = if opts.law_replications == 0 { DEFAULT_LAW_REPLICATIONS } else { opts.law_replications };
    let n = 20;
    let (theta1, theta2) = (0.5, 1.0);
    let mut s1 = SeededStream::new(opts.seed, 2);
    let mut s2 = SeededStream::new(opts.seed, 3);
    let mean = |st: &mut SeededStream, theta: f64| (0..n).map(|_| st.next_exponential(theta)).sum::<f64>() / n as f64;

    let mut thetas = Vec::with_capacity(reps);
    let mut ratios = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t1 = mean(&mut s1, theta1);
        let t2 = mean(&mut s2, theta2);
        thetas.push(t1);
        ratios.push(t1 / t2 / (theta1 / theta2));
    }

    let gamma = Gamma::new(n as f64, n as f64 / theta1)
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    let critical = ks_critical_1pct(reps);
    let d = ks_statistic(&mut thetas, |x| gamma.cdf(x));
    s.expect(d <= critical, || format!("theta hat vs Gamma: D = {d}, critical {critical}"));

    let law = FDistParams::new(2 * n as u64, 2 * n as u64)?;
    let d = ks_statistic(&mut ratios, |x| f_cdf(law, x).unwrap_or(f64::NAN));
    s.expect(d <= critical, || format!("R hat / R vs F: D = {d}, critical {critical}"));
    Ok(s.finish())
}

/// Runs every suite.
pub fn run_checks(opts: &CheckOptions) -> Result<CheckReport> {
    let suites = vec![
        oracle_suite(opts)?,
        shape_suite(opts)?,
        quantile_suite(opts)?,
        distribution_suite(opts)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(CheckReport { suites, passed })
}
