//! Monte Carlo properties of the estimators against exact or independent
//! references.

use expovl::distributions::{f_cdf, f_pdf, sample_exponential, FDistParams, SeededStream};
use expovl::estimation::{
    estimate_report, ovl_point_estimates, ratio_estimates, taylor_variances, variance_factor, EstimatorOptions,
    RatioEstimates, TwoSample,
};
use expovl::measures::quartet_of_r;
use expovl::quadrature::{integrate, QuadConfig};
use expovl::simulation::{run_study, SimConfig};
use expovl::{Coefficient, RatioR};

fn r(v: f64) -> RatioR {
    RatioR::new(v).unwrap()
}

fn draw(seed: u64, theta1: f64, theta2: f64, n1: usize, n2: usize) -> TwoSample {
    let x1 = sample_exponential(&mut SeededStream::new(seed, 0), theta1, n1).unwrap();
    let x2 = sample_exponential(&mut SeededStream::new(seed, 1), theta2, n2).unwrap();
    TwoSample::new(x1, x2).unwrap()
}

/// Exact mean and variance of `g(k·R·F)` with `F ~ F(2n₁, 2n₂)`.
fn exact_moments(which: Coefficient, ratio: f64, k: f64, n1: usize, n2: usize) -> (f64, f64) {
    let law = FDistParams::new(2 * n1 as u64, 2 * n2 as u64).unwrap();
    let g = |x: f64| if x <= 0.0 { 0.0 } else { which.of_r(r(k * ratio * x)) };
    let cfg = QuadConfig::default();
    let moment = |p: i32| {
        // the pdf is negligible beyond 6 for the sizes used here
        integrate(|x| g(x).powi(p) * f_pdf(law, x), 0.0, 6.0, cfg).unwrap().value
    };
    let (m1, m2) = (moment(1), moment(2));
    (m1, m2 - m1 * m1)
}

#[test]
fn corrected_ratio_is_unbiased() {
    let (n1, n2, ratio) = (15, 12, 0.6);
    let reps = 40_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for rep in 0..reps {
        let mut a = SeededStream::new(11, 2 * rep);
        let mut b = SeededStream::new(11, 2 * rep + 1);
        let t1 = (0..n1).map(|_| a.next_exponential(ratio)).sum::<f64>() / n1 as f64;
        let t2 = (0..n2).map(|_| b.next_exponential(1.0)).sum::<f64>() / n2 as f64;
        let star = RatioEstimates::from_thetas(t1, t2, n1, n2).r_hat_star;
        sum += star;
        sum_sq += star * star;
    }
    let mean = sum / reps as f64;
    let var = sum_sq / reps as f64 - mean * mean;
    let se = (var / reps as f64).sqrt();
    assert!((mean - ratio).abs() < 4.0 * se, "mean {mean}, se {se}");
    // Var(R̂*) = R²·c exactly
    let exact = ratio * ratio * variance_factor(n1, n2).unwrap();
    assert!((var / exact - 1.0).abs() < 0.03, "{var} vs {exact}");
}

#[test]
fn plug_in_error_shrinks_with_n() {
    let (theta1, theta2) = (0.4, 1.0);
    let truth = quartet_of_r(r(theta1 / theta2));
    let mut previous = [f64::INFINITY; 4];
    for n in [100, 1_000, 10_000] {
        let mut errors: Vec<[f64; 4]> = (0..201)
            .map(|rep| {
                let s = draw(1_000 + rep, theta1, theta2, n, n);
                let est = ovl_point_estimates(&ratio_estimates(&s), EstimatorOptions::default()).unwrap();
                Coefficient::ALL.map(|c| (est.get(c) - truth.get(c)).abs())
            })
            .collect();
        for k in 0..4 {
            errors.sort_by(|a, b| a[k].total_cmp(&b[k]));
            let median = errors[100][k];
            assert!(median < previous[k], "n = {n}, coefficient {k}: {median} >= {}", previous[k]);
            previous[k] = median;
        }
    }
}

/// Exact `P(|Δ̂ − target| ≤ half_width)` for equal sizes `n`, using that
/// Δ̂ = Δ(k·R·F) is increasing in `F` below `1/(kR)`.
fn exact_delta_band_probability(ratio: f64, n: usize, target: f64, half_width: f64) -> f64 {
    let k = (n as f64 - 1.0) / n as f64;
    let law = FDistParams::new(2 * n as u64, 2 * n as u64).unwrap();
    let solve = |level: f64| {
        let (mut lo, mut hi) = (1e-9, 1.0 / (k * ratio));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if Coefficient::Delta.of_r(r(k * ratio * mid)) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    f_cdf(law, solve(target + half_width)).unwrap() - f_cdf(law, solve(target - half_width)).unwrap()
}

#[test]
fn delta_hat_concentrates_at_large_n() {
    // θ₁ = 1, θ₂ = 5 → R = 0.2, Δ ≈ 0.465. The sd of Δ̂ at n = 500 is about
    // 0.017, so roughly three quarters of the estimates land within 0.02.
    let expected = exact_delta_band_probability(0.2, 500, 0.465, 0.02);
    assert!((expected - 0.76).abs() < 0.02, "{expected}");
    let reps = 1_000;
    let hits = (0..reps)
        .filter(|&rep| {
            let s = draw(50_000 + rep, 1.0, 5.0, 500, 500);
            let est = ovl_point_estimates(&ratio_estimates(&s), EstimatorOptions::default()).unwrap();
            (est.delta - 0.465).abs() <= 0.02
        })
        .count();
    let rate = hits as f64 / reps as f64;
    let se = (expected * (1.0 - expected) / reps as f64).sqrt();
    assert!((rate - expected).abs() < 4.0 * se, "{rate} vs {expected}");
}

#[test]
fn estimate_report_from_large_samples() {
    let s = draw(5, 1.0, 2.0, 10_000, 10_000);
    let report = estimate_report(&s, EstimatorOptions::default()).unwrap();
    assert!((report.coefficients.delta.point - 0.75).abs() < 0.02);
    assert!(report.coefficients.rho.approx_variance > 0.0);
    // deterministic in its input
    assert_eq!(report, estimate_report(&s, EstimatorOptions::default()).unwrap());
}

#[test]
fn exact_moments_match_simulation() {
    // checks the exact-moment oracle itself against a 10⁵ replication run
    let cfg = SimConfig {
        r_values: vec![0.5],
        sample_sizes: vec![30],
        replications: 100_000,
        ..SimConfig::default()
    };
    let cell = &run_study(&cfg).unwrap().cells[0];
    let k = 29.0 / 30.0;
    for c in Coefficient::ALL {
        let scale = if c == Coefficient::KlLambda { 1.0 } else { k };
        let (mean, var) = exact_moments(c, 0.5, scale, 30, 30);
        let s = cell.stats.get(c);
        assert!((s.mean_estimate - mean).abs() < 4.0 * s.mc_standard_error, "{c}: {} vs {mean}", s.mean_estimate);
        assert!((s.variance / var - 1.0).abs() < 0.02, "{c}: {} vs {var}", s.variance);
    }
}

/// Empirical variances at n = 200 over 10⁵ replications against the
/// first-order variances. ρ̂ and λ̂ at R = 0.8 sit about 11% above the
/// first-order value because g′(0.8) is small and the second-order term
/// dominates; those two are checked against the exact variance instead.
#[test]
fn variances_at_n_200() {
    let cfg = SimConfig {
        r_values: vec![0.2, 0.5, 0.8],
        sample_sizes: vec![200],
        replications: 100_000,
        ..SimConfig::default()
    };
    let table = run_study(&cfg).unwrap();
    for cell in &table.cells {
        let theory = taylor_variances(r(cell.r), 200, 200).unwrap();
        for c in Coefficient::ALL {
            let empirical = cell.stats.get(c).variance;
            let first_order = *theory.get(c);
            let rel = (first_order - empirical).abs() / empirical;
            let second_order_cell = cell.r == 0.8 && matches!(c, Coefficient::Rho | Coefficient::Lambda);
            if second_order_cell {
                assert!(rel > 0.08 && rel < 0.15, "{c} at {}: rel {rel}", cell.r);
                let (_, exact) = exact_moments(c, cell.r, 199.0 / 200.0, 200, 200);
                assert!((empirical / exact - 1.0).abs() < 0.02, "{c} at {}: {empirical} vs {exact}", cell.r);
            } else {
                assert!(rel <= 0.10, "{c} at {}: rel {rel}", cell.r);
            }
        }
    }
}

#[test]
fn kl_variance_matches_derivative_form() {
    for v in [0.1, 0.3, 0.7, 1.5, 3.0, 9.0] {
        let c = variance_factor(40, 35).unwrap();
        let q = v * v - v + 1.0;
        let slope = (1.0 - v * v) / (q * q);
        let expected = slope * slope * v * v * c;
        let got = taylor_variances(r(v), 40, 35).unwrap().kl_lambda;
        assert!(((got - expected) / expected).abs() <= 1e-10);
    }
}

/// The exact sampling law puts the Λ̂ bias at (0.8, 20) near −0.066 and the
/// Δ̂ bias at (0.5, 20) near −0.015, against tabulated −0.20 and −0.031.
/// Monte Carlo agrees with the exact values, not with the table.
#[test]
fn exact_small_sample_biases() {
    let cfg = SimConfig {
        r_values: vec![0.5, 0.8],
        sample_sizes: vec![20],
        replications: 100_000,
        ..SimConfig::default()
    };
    let table = run_study(&cfg).unwrap();
    let cases = [
        (0.8, Coefficient::KlLambda, 1.0, -0.066198),
        (0.5, Coefficient::Delta, 19.0 / 20.0, -0.015397),
    ];
    for (ratio, c, k, frozen) in cases {
        let (mean, _) = exact_moments(c, ratio, k, 20, 20);
        let exact = mean - c.of_r(r(ratio));
        assert!((exact - frozen).abs() < 2e-6, "{c}: {exact}");
        let s = table.cell(ratio, 20).unwrap().stats.get(c);
        assert!((s.bias - exact).abs() < 4.0 * s.mc_standard_error, "{c}: {} vs {exact}", s.bias);
    }
}
