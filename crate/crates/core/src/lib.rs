//! Overlap coefficients between two exponential populations.
//!
//! Four similarity measures are supported: Weitzman's Δ, Matusita's ρ,
//! Morisita's λ and the Kullback-Leibler based Λ = 1/(1 + J), where J is the
//! symmetric (Jeffreys) divergence. For two exponential laws every one of them
//! depends only on the parameter ratio `R = θ₁/θ₂`.
//!
//! The crate is layered bottom-up:
//!
//! * [`measures`]: closed forms in `R` and a quadrature oracle over the
//!   actual densities.
//! * [`distributions`]: seeded substreams, exponential sampling and the F law
//!   (regularized incomplete beta, CDF, quantile).
//! * [`estimation`]: MLEs, the corrected ratio estimator, plug-in point
//!   estimates and first/second order Taylor approximations.
//! * [`confidence`]: exact F-pivot interval for `R` and its image under each
//!   coefficient.
//! * [`simulation`]: deterministic, parallel Monte Carlo study of bias and MSE.
//! * [`check`]: self-check suites used by the command-line `check` command.

pub mod check;
pub mod confidence;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod quadrature;
pub mod simulation;

pub use error::{Error, Result};
pub use measures::{Coefficient, ExponentialParams, OverlapQuartet, Parameterization, PerCoefficient, RatioR};
