use serde::{Deserialize, Serialize};

use super::stats::{ks_test, median};
use super::Check;
use crate::rng::RngStream;
use crate::sampling::{angle_tail_bound, angle_to_axis, sample_unit_sphere, ExactConeSampler};
use crate::vector::{dot, Vector};

/// CDF of `|N(0,1)|`.
pub fn half_normal_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        statrs::function::erf::erf(x / std::f64::consts::SQRT_2)
    }
}

/// Spread of `|⟨m̂, u⟩|` for a fixed unit `m̂` and uniform unit `u`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub d: usize,
    pub n_samples: usize,
    pub median_abs: f64,
    /// `3/√d`
    pub median_bound: f64,
    /// KS distance of `√d·|⟨m̂, u⟩|` from `|N(0,1)|`.
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub checks: Vec<Check>,
}

pub fn inner_product_concentration(d: usize, n_samples: usize, rng: &mut RngStream) -> ConcentrationReport {
    let m_hat: Vector<f64> = sample_unit_sphere(rng, d);
    let abs: Vec<f64> = (0..n_samples)
        .map(|_| {
            let u: Vector<f64> = sample_unit_sphere(rng, d);
            dot(&m_hat, &u).abs()
        })
        .collect();
    let median_abs = median(&abs);
    let median_bound = 3.0 / (d as f64).sqrt();
    let scaled: Vec<f64> = abs.iter().map(|v| v * (d as f64).sqrt()).collect();
    let ks = ks_test(&scaled, half_normal_cdf);
    let checks = vec![Check::upper(format!("inner_product/median_d{d}"), median_abs, median_bound, None, n_samples as u64)];
    ConcentrationReport {
        d,
        n_samples,
        median_abs,
        median_bound,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
        checks,
    }
}

/// Lower tail `P(γ ≤ θ')` of the angle between an exact cone sample and its axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngleTailReport {
    pub d: usize,
    pub theta: f64,
    pub theta_prime: f64,
    pub n_samples: usize,
    pub empirical: f64,
    /// Probability from the sampler's own table.
    pub tabulated: f64,
    /// `θ'/(θ−s)·(sin θ'/sin s)^{d−1}`, `s = (θ+θ')/2`.
    pub bound: f64,
    /// Largest deviation of a sample's norm from `√d`.
    pub max_norm_error: f64,
}

pub fn angle_tail(d: usize, theta: f64, theta_prime: f64, n_samples: usize, rng: &mut RngStream) -> AngleTailReport {
    let sampler = ExactConeSampler::new(d, theta);
    let axis: Vector<f64> = sample_unit_sphere(rng, d);
    let sqrt_d = (d as f64).sqrt();
    let mut hits = 0usize;
    let mut max_norm_error = 0.0f64;
    for _ in 0..n_samples {
        let z: Vector<f64> = sampler.sample(&axis, rng);
        max_norm_error = max_norm_error.max((z.norm() - sqrt_d).abs());
        if angle_to_axis(&z, &axis) <= theta_prime {
            hits += 1;
        }
    }
    AngleTailReport {
        d,
        theta,
        theta_prime,
        n_samples,
        empirical: hits as f64 / n_samples as f64,
        tabulated: sampler.cdf(theta_prime),
        bound: angle_tail_bound(theta, theta_prime, d),
        max_norm_error,
    }
}
