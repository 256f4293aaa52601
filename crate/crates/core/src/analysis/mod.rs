//! Monte-Carlo verification of the estimator moments, the cone-angle
//! concentration and the one-step descent inequality, plus per-run
//! alignment diagnostics.
//!
//! Statistical gates accept a deviation of `5·SE + 1e-3·|expected|` plus a
//! rounding floor proportional to the natural scale of the quantity. At
//! 5 standard errors a single two-sided gate fails by chance with
//! probability about 6e-7.

mod alignment;
mod concentration;
mod descent;
mod moments;
pub mod stats;
mod suite;

use serde::{Deserialize, Serialize};

pub use alignment::{alignment, track_alignment, Alignment};
pub use concentration::{
    angle_tail, half_normal_cdf, inner_product_concentration, AngleTailReport, ConcentrationReport,
};
pub use descent::{
    descent_rhs, first_order_decrease, momentum_with_alignment, optimal_eta, theta_star_margins,
    verify_descent, DescentReport,
};
pub use moments::{
    cone_first_moment_analytic, cone_second_moment_exact, verify_cone_moments, verify_cone_moments_at,
    verify_vanilla_moments, MomentReport, SecondMoment, VanillaReport,
};
pub use suite::{run_suite, SuiteGrid};

/// One verification outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Observed value.
    pub statistic: f64,
    /// Reference value, or the limit for one-sided checks.
    pub expected: f64,
    pub std_error: Option<f64>,
    /// `(statistic − expected) / std_error` when a standard error applies.
    pub z_score: Option<f64>,
    /// Largest accepted deviation (two-sided checks) or zero (one-sided).
    pub tolerance: f64,
    pub passed: bool,
    pub n: u64,
}

impl Check {
    /// Passes when `statistic ≤ limit`.
    pub fn upper(name: impl Into<String>, statistic: f64, limit: f64, z_score: Option<f64>, n: u64) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected: limit,
            std_error: None,
            z_score,
            tolerance: 0.0,
            passed: statistic <= limit,
            n,
        }
    }

    /// Passes when `statistic ≥ limit`.
    pub fn lower(name: impl Into<String>, statistic: f64, limit: f64, n: u64) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected: limit,
            std_error: None,
            z_score: None,
            tolerance: 0.0,
            passed: statistic >= limit,
            n,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} observed={:.6e} expected={:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.expected
        )?;
        if let Some(z) = self.z_score {
            write!(f, " z={z:.3}")?;
        }
        write!(f, " n={}", self.n)
    }
}

/// Two-sided statistical gate: `|statistic − expected| ≤ 5·se + 1e-3·|expected| + floor`.
pub(crate) fn gate(name: String, statistic: f64, expected: f64, se: f64, floor: f64, n: u64) -> Check {
    let tolerance = 5.0 * se + 1e-3 * expected.abs() + floor;
    let dev = statistic - expected;
    Check {
        name,
        statistic,
        expected,
        std_error: Some(se),
        z_score: (se > 0.0).then(|| dev / se),
        tolerance,
        passed: dev.abs() <= tolerance,
        n,
    }
}
