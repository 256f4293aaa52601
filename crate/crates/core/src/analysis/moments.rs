//! First and second moments of `(z·a)z` for cone directions.
//!
//! `z = √d(cos θ·m̂ + sin θ·u)` with `u` uniform on the unit sphere. Writing
//! the same vector as `cos θ·√d·m̂ + sin θ·ũ` with `ũ` uniform on `√d·S^{d-1}`
//! gives the convention used by the second-moment identity; the two are the
//! same random vector, so no conversion is needed.

use serde::{Deserialize, Serialize};

use super::stats::Welford;
use super::{gate, Check};
use crate::rng::RngStream;
use crate::sampling::{cone_direction_fast_into, sample_gaussian, sample_unit_sphere, ConeDirectionSpec};
use crate::scalar::cone_trig;
use crate::vector::{dot, norm, Vector};

/// `E[(z·a)z] = d cos²θ (m̂·a) m̂ + sin²θ a`.
pub fn cone_first_moment_analytic(a: &[f64], m_hat: &[f64], theta: f64) -> Vector<f64> {
    assert_eq!(a.len(), m_hat.len(), "first moment: length mismatch");
    let d = a.len() as f64;
    let (c, s) = cone_trig(theta);
    let along = d * c * c * dot(m_hat, a);
    Vector::from_fn(a.len(), |i| along * m_hat[i] + s * s * a[i])
}

/// `E‖(z·a)z‖²` in closed form together with its looser upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondMoment {
    /// `d cos²θ (d + 4 sin²θ)(m̂·a)² + d sin²θ ‖a‖²`
    pub exact: f64,
    /// `d((d+4) cos²θ cos²ρ + sin²θ)‖a‖²`
    pub bound: f64,
}

pub fn cone_second_moment_exact(a: &[f64], m_hat: &[f64], theta: f64) -> SecondMoment {
    assert_eq!(a.len(), m_hat.len(), "second moment: length mismatch");
    let d = a.len() as f64;
    let (c, s) = cone_trig(theta);
    let (c2, s2) = (c * c, s * s);
    let ma = dot(m_hat, a);
    let a2 = dot(a, a);
    let cos2_rho = if a2 > 0.0 { ma * ma / a2 } else { 0.0 };
    SecondMoment {
        exact: d * c2 * (d + 4.0 * s2) * ma * ma + d * s2 * a2,
        bound: d * ((d + 4.0) * c2 * cos2_rho + s2) * a2,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub d: usize,
    pub theta: f64,
    pub empirical_mean: Vec<f64>,
    pub analytic_mean: Vec<f64>,
    pub empirical_second: f64,
    pub analytic_second_exact: f64,
    pub analytic_second_bound: f64,
    pub n_samples: u64,
    /// Standard error of the empirical second moment.
    pub std_error: f64,
    pub checks: Vec<Check>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Draws `a ~ N(0, I)` and `m̂` uniform on the sphere, then runs
/// [`verify_cone_moments_at`].
pub fn verify_cone_moments(d: usize, theta: f64, n_samples: u64, rng: &mut RngStream) -> MomentReport {
    let a: Vector<f64> = sample_gaussian(rng, d);
    let m_hat: Vector<f64> = sample_unit_sphere(rng, d);
    verify_cone_moments_at(&a, &m_hat, theta, n_samples, rng)
}

/// Monte-Carlo moments of `(z·a)z` over `n_samples` fast cone draws.
///
/// The first moment is compared along `m̂`, along the unit part of `a`
/// orthogonal to `m̂`, and along the unit analytic mean. The second moment is
/// compared with the exact identity (5 standard errors and 1% relative) and
/// with the bound.
pub fn verify_cone_moments_at(
    a: &[f64],
    m_hat: &[f64],
    theta: f64,
    n_samples: u64,
    rng: &mut RngStream,
) -> MomentReport {
    let d = a.len();
    assert!(n_samples >= 2, "need at least two samples");
    assert!((norm(m_hat) - 1.0).abs() < 1e-10, "m_hat must be a unit vector");
    let analytic = cone_first_moment_analytic(a, m_hat, theta);
    let second = cone_second_moment_exact(a, m_hat, theta);
    let a_norm = norm(a);
    let (names, axes) = projection_axes(a, m_hat, &analytic);

    let spec = ConeDirectionSpec::new(theta, m_hat);
    let mut z = vec![0.0; d];
    let mut sum = vec![0.0; d];
    let mut proj: Vec<Welford> = vec![Welford::new(); axes.len()];
    let mut sq = Welford::new();
    for _ in 0..n_samples {
        cone_direction_fast_into(&spec, rng, &mut z);
        let c = dot(&z, a);
        for (s, &zi) in sum.iter_mut().zip(&z) {
            *s += c * zi;
        }
        for (w, e) in proj.iter_mut().zip(&axes) {
            w.push(c * dot(&z, e));
        }
        sq.push(c * c * dot(&z, &z));
    }
    let n = n_samples as f64;
    let empirical_mean: Vec<f64> = sum.iter().map(|s| s / n).collect();

    let dn = d as f64;
    let mut checks = Vec::new();
    for ((name, e), w) in names.iter().zip(&axes).zip(&proj) {
        let expected = dot(&analytic, e);
        checks.push(gate(
            format!("first_moment/{name}"),
            w.mean(),
            expected,
            w.std_error(),
            1e-9 * dn * a_norm,
            n_samples,
        ));
    }
    let mut second_check = gate(
        "second_moment/exact".into(),
        sq.mean(),
        second.exact,
        sq.std_error(),
        1e-9 * dn * dn * a_norm * a_norm,
        n_samples,
    );
    let rel = (sq.mean() - second.exact).abs() / second.exact.max(f64::MIN_POSITIVE);
    second_check.passed &= rel <= 0.01;
    checks.push(second_check);
    checks.push(Check::upper(
        "second_moment/exact_le_bound",
        second.exact,
        second.bound * (1.0 + 1e-12),
        None,
        1,
    ));
    checks.push(Check::upper(
        "second_moment/empirical_le_bound",
        sq.mean(),
        second.bound + 5.0 * sq.std_error() + 1e-9 * dn * dn * a_norm * a_norm,
        Some((sq.mean() - second.bound) / sq.std_error().max(f64::MIN_POSITIVE)),
        n_samples,
    ));

    MomentReport {
        d,
        theta,
        empirical_mean,
        analytic_mean: analytic.into_vec(),
        empirical_second: sq.mean(),
        analytic_second_exact: second.exact,
        analytic_second_bound: second.bound,
        n_samples,
        std_error: sq.std_error(),
        checks,
    }
}

fn projection_axes(a: &[f64], m_hat: &[f64], analytic: &[f64]) -> (Vec<&'static str>, Vec<Vec<f64>>) {
    let a_norm = norm(a);
    let unit = |v: Vec<f64>| -> Option<Vec<f64>> {
        let n = norm(&v);
        (n > 1e-12 * a_norm.max(1.0)).then(|| v.iter().map(|x| x / n).collect())
    };
    let mut names = vec!["along_m_hat"];
    let mut axes = vec![m_hat.to_vec()];
    let ma = dot(m_hat, a);
    if let Some(perp) = unit(a.iter().zip(m_hat).map(|(ai, mi)| ai - ma * mi).collect()) {
        names.push("along_a_perp");
        axes.push(perp);
    }
    let total = unit(analytic.to_vec()).or_else(|| unit(a.to_vec()));
    if let Some(total) = total {
        names.push("along_mean");
        axes.push(total);
    }
    (names, axes)
}

/// Sphere-direction moments (`θ = π/2`): the mean is `a` and the second moment
/// is `d‖a‖²`, below the `2d‖a‖²` bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanillaReport {
    pub d: usize,
    pub n_samples: u64,
    pub empirical_second: f64,
    /// `d‖a‖²`
    pub exact_second: f64,
    /// `2d‖a‖²`
    pub bound: f64,
    pub checks: Vec<Check>,
}

impl VanillaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify_vanilla_moments(d: usize, n_samples: u64, rng: &mut RngStream) -> VanillaReport {
    let a: Vector<f64> = sample_gaussian(rng, d);
    let m_hat: Vector<f64> = sample_unit_sphere(rng, d);
    let report = verify_cone_moments_at(&a, &m_hat, std::f64::consts::FRAC_PI_2, n_samples, rng);
    let a2 = a.norm_squared();
    let bound = 2.0 * d as f64 * a2;
    let mut checks: Vec<Check> = report
        .checks
        .into_iter()
        .filter(|c| c.name.starts_with("first_moment"))
        .map(|mut c| {
            c.name = c.name.replacen("first_moment", "vanilla_mean", 1);
            c
        })
        .collect();
    checks.push(Check::upper("vanilla_second_le_2d", report.empirical_second, bound, None, n_samples));
    VanillaReport {
        d,
        n_samples,
        empirical_second: report.empirical_second,
        exact_second: d as f64 * a2,
        bound,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pair(d: usize, seed: u64) -> (Vector<f64>, Vector<f64>) {
        let mut rng = RngStream::with_stream(seed, 7);
        (sample_gaussian(&mut rng, d), sample_unit_sphere(&mut rng, d))
    }

    #[test]
    fn first_moment_special_cases() {
        let (a, m) = pair(20, 1);
        assert_eq!(cone_first_moment_analytic(&a, &m, FRAC_PI_2).as_slice(), a.as_slice());
        let along = cone_first_moment_analytic(&m, &m, 0.0);
        for (x, y) in along.iter().zip(m.iter()) {
            assert!((x - 20.0 * y).abs() < 1e-12);
        }
        let e0 = [1.0, 0.0, 0.0];
        let e1 = [0.0, 2.0, 0.0];
        assert!(cone_first_moment_analytic(&e1, &e0, 0.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn second_moment_special_cases() {
        let (a, m) = pair(30, 2);
        let s = cone_second_moment_exact(&a, &m, FRAC_PI_2);
        assert!((s.exact - 30.0 * a.norm_squared()).abs() < 1e-9 * s.exact);
        let s = cone_second_moment_exact(&m, &m, 0.0);
        assert!((s.exact - 900.0).abs() < 1e-9);
    }

    #[test]
    fn exact_never_exceeds_bound() {
        for d in [2usize, 3, 10, 50, 200, 1000, 5000, 10_000, 100_000, 1_000_000] {
            for k in 0..=20 {
                let theta = FRAC_PI_2 * k as f64 / 20.0;
                for j in 0..=10 {
                    let rho = FRAC_PI_2 * j as f64 / 10.0;
                    let mut a = vec![0.0; d];
                    let mut m = vec![0.0; d];
                    m[0] = 1.0;
                    a[0] = 3.0 * rho.cos();
                    a[1] = 3.0 * rho.sin();
                    let s = cone_second_moment_exact(&a, &m, theta);
                    assert!(s.exact <= s.bound * (1.0 + 1e-12), "d={d} θ={theta} ρ={rho}");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_matches_closed_forms() {
        let mut rng = RngStream::with_stream(3, 2);
        for theta in [0.0, 0.8, FRAC_PI_2] {
            let r = verify_cone_moments(8, theta, 40_000, &mut rng);
            assert!(r.passed(), "{:#?}", r.checks);
        }
    }

    #[test]
    fn detects_a_wrong_identity() {
        // With the sin² weight dropped the first moment along a⊥ is off by far more than 5σ.
        let (a, m) = pair(10, 4);
        let mut rng = RngStream::with_stream(5, 2);
        let r = verify_cone_moments_at(&a, &m, 1.0, 40_000, &mut rng);
        let perp = r.checks.iter().find(|c| c.name == "first_moment/along_a_perp").unwrap();
        let s = 1.0f64.sin();
        let wrong = perp.expected / (s * s);
        assert!((perp.statistic - wrong).abs() > 5.0 * perp.std_error.unwrap());
    }
}
