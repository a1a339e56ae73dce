//! Published reference values for the default grid, R ∈ {0.2, 0.5, 0.8} ×
//! n ∈ {20, 50, 100, 200, 500} with 1000 replications.
//!
//! Entries printed as "0.000*" (|value| < 0.001) are stored as 0 with the
//! `*_below_display` flag set. Two bias entries break the monotone trend of
//! their columns by an order of magnitude and are marked excluded.

use serde::{Deserialize, Serialize};

use crate::measures::Coefficient;

pub const REFERENCE_R_VALUES: [f64; 3] = [0.2, 0.5, 0.8];
pub const REFERENCE_SAMPLE_SIZES: [usize; 5] = [20, 50, 100, 200, 500];
pub const REFERENCE_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub r: f64,
    pub n: usize,
    pub coefficient: Coefficient,
    pub bias: f64,
    pub mse: f64,
    /// Published Bias/σ.
    pub ratio: f64,
    pub bias_below_display: bool,
    pub mse_below_display: bool,
    pub bias_excluded: bool,
}

/// `None` marks a "0.000*" entry.
type Triple = (Option<f64>, Option<f64>, f64);

// Column order within a row: ρ, λ, Δ, Λ.
const ROWS: [(f64, usize, [Triple; 4]); 15] = [
    (0.2, 20, [(Some(-0.029), Some(0.007), -0.36), (Some(-0.030), Some(0.016), -0.25), (Some(-0.0180), Some(0.008), -0.061), (Some(0.0060), Some(0.0080), 0.067)]),
    (0.2, 50, [(Some(-0.011), Some(0.003), -0.22), (Some(-0.012), Some(0.006), -0.15), (Some(-0.0070), Some(0.007), -0.030), (Some(0.0020), Some(0.0030), 0.041)]),
    (0.2, 100, [(Some(-0.055), Some(0.001), -0.15), (Some(-0.056), Some(0.003), -0.11), (Some(-0.0034), Some(0.0015), -0.017), (Some(0.0011), Some(0.0015), 0.029)]),
    (0.2, 200, [(Some(-0.003), None, -0.11), (Some(-0.003), Some(0.001), -0.07), (Some(-0.0020), Some(0.027), 0.010), (None, None, 0.020)]),
    (0.2, 500, [(Some(-0.001), None, -0.07), (Some(-0.001), None, -0.05), (None, None, -0.039), (None, None, 0.013)]),
    (0.5, 20, [(Some(-0.036), Some(0.0040), -0.71), (Some(-0.640), Some(0.0140), -0.66), (Some(-0.031), Some(0.014), -0.092), (Some(0.048), Some(0.0500), 0.22)]),
    (0.5, 50, [(Some(-0.014), Some(0.0010), -0.44), (Some(-0.024), Some(0.0040), -0.41), (Some(-0.012), Some(0.005), -0.045), (Some(0.018), Some(0.0190), 0.013)]),
    (0.5, 100, [(Some(-0.007), None, -0.31), (Some(-0.012), Some(0.0020), -0.28), (Some(-0.006), Some(0.0024), -0.026), (Some(0.009), Some(0.0090), 0.095)]),
    (0.5, 200, [(Some(-0.003), None, -0.27), (Some(-0.006), None, -0.20), (Some(-0.003), Some(0.001), -0.015), (Some(0.004), Some(0.0045), 0.067)]),
    (0.5, 500, [(Some(-0.001), None, -0.13), (Some(-0.002), None, -0.13), (Some(-0.001), None, -0.05), (Some(-0.0018), Some(0.0018), -0.042)]),
    (0.8, 20, [(Some(-0.032), Some(0.001), -0.87), (Some(-0.063), Some(0.005), -0.87), (Some(-0.037), Some(0.016), -0.3), (Some(-0.20), Some(0.061), -0.84)]),
    (0.8, 50, [(Some(-0.012), None, -0.74), (Some(-0.024), Some(0.0011), -0.73), (Some(-0.014), Some(0.006), -0.19), (Some(-0.079), Some(0.013), -0.69)]),
    (0.8, 100, [(Some(-0.006), None, -0.61), (Some(-0.012), None, -0.6), (Some(-0.007), Some(0.0027), -0.133), (Some(-0.039), Some(0.005), -0.56)]),
    (0.8, 200, [(Some(-0.003), None, -0.47), (Some(-0.006), None, -0.47), (Some(-0.003), Some(0.001), -0.09), (Some(-0.019), Some(0.002), -0.43)]),
    (0.8, 500, [(Some(-0.001), None, -0.32), (Some(-0.002), None, -0.32), (Some(-0.001), None, -0.06), (Some(-0.008), None, -0.28)]),
];

const COLUMNS: [Coefficient; 4] = [Coefficient::Rho, Coefficient::Lambda, Coefficient::Delta, Coefficient::KlLambda];

/// Bias entries that are excluded from pass/fail: ρ at (0.2, 100) and λ at (0.5, 20).
const EXCLUDED_BIAS: [(f64, usize, Coefficient); 2] = [(0.2, 100, Coefficient::Rho), (0.5, 20, Coefficient::Lambda)];

/// All 60 reference entries, ordered by R, n, then Δ, ρ, λ, Λ.
pub fn reference_entries() -> Vec<ReferenceEntry> {
    let mut out = Vec::with_capacity(60);
    for (r, n, row) in ROWS {
        for c in Coefficient::ALL {
            let col = COLUMNS.iter().position(|&k| k == c).expect("every coefficient has a column");
            let (bias, mse, ratio) = row[col];
            out.push(ReferenceEntry {
                r,
                n,
                coefficient: c,
                bias: bias.unwrap_or(0.0),
                mse: mse.unwrap_or(0.0),
                ratio,
                bias_below_display: bias.is_none(),
                mse_below_display: mse.is_none(),
                bias_excluded: EXCLUDED_BIAS.contains(&(r, n, c)),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{taylor_biases, taylor_variances};
    use crate::measures::RatioR;

    #[test]
    fn shape() {
        let e = reference_entries();
        assert_eq!(e.len(), 60);
        assert_eq!(e.iter().filter(|x| x.bias_excluded).count(), 2);
        let lam = e.iter().find(|x| x.r == 0.5 && x.n == 20 && x.coefficient == Coefficient::Lambda).unwrap();
        assert_eq!(lam.bias, -0.640);
        assert!(lam.bias_excluded);
        let kl = e.iter().find(|x| x.r == 0.8 && x.n == 20 && x.coefficient == Coefficient::KlLambda).unwrap();
        assert_eq!((kl.bias, kl.mse), (-0.20, 0.061));
    }

    /// The published bias and MSE entries coincide with the second-order bias
    /// formulas and with variance + bias² from the first-order variances
    /// (Λ up to sign), not with Monte Carlo output. Cells whose printed value
    /// disagrees with the formula by a misplaced digit are listed explicitly.
    #[test]
    fn reference_entries_track_the_closed_form_approximations() {
        let misprinted = [
            (0.2, 100, Coefficient::Rho, "bias"),
            (0.2, 100, Coefficient::Lambda, "bias"),
            (0.5, 20, Coefficient::Lambda, "bias"),
            (0.2, 50, Coefficient::Delta, "mse"),
            (0.2, 200, Coefficient::Delta, "mse"),
        ];
        for e in reference_entries() {
            let r = RatioR::new(e.r).unwrap();
            let bias = taylor_biases(r, e.n, e.n).unwrap().get(e.coefficient).unwrap();
            let var = *taylor_variances(r, e.n, e.n).unwrap().get(e.coefficient);
            let bias_cmp = if e.coefficient == Coefficient::KlLambda { bias.abs() } else { bias };
            let ref_bias = if e.coefficient == Coefficient::KlLambda { e.bias.abs() } else { e.bias };
            if !misprinted.contains(&(e.r, e.n, e.coefficient, "bias")) {
                assert!((bias_cmp - ref_bias).abs() <= 1e-3_f64.max(0.04 * ref_bias.abs()), "bias {e:?}: formula {bias}");
            }
            if !misprinted.contains(&(e.r, e.n, e.coefficient, "mse")) {
                let mse = var + bias * bias;
                assert!((mse - e.mse).abs() <= 1.1e-3, "mse {e:?}: formula {mse}");
            }
        }
    }
}
