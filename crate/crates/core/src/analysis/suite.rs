use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::concentration::{angle_tail, inner_product_concentration};
use super::descent::{momentum_with_alignment, optimal_eta, theta_star_margins, verify_descent};
use super::moments::{cone_second_moment_exact, verify_cone_moments, verify_vanilla_moments};
use super::Check;
use crate::estimator::Objective;
use crate::optimizer::theta_star;
use crate::problems::make_benchmark_quadratic;
use crate::rng::{RngStream, ANALYSIS_STREAM};

/// Size of the verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteGrid {
    /// A few seconds; reduced grids and sample counts.
    Small,
    /// The full grids at full sample counts.
    Full,
}

impl std::str::FromStr for SuiteGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(SuiteGrid::Small),
            "full" => Ok(SuiteGrid::Full),
            other => Err(format!("unknown grid '{other}' (expected small or full)")),
        }
    }
}

struct Plan {
    moment_dims: &'static [usize],
    moment_thetas: &'static [f64],
    moment_samples: u64,
    inner_product_dims: &'static [usize],
    inner_product_samples: usize,
    angle_tail_dims: &'static [usize],
    angle_tail_samples: usize,
    descent_dim: usize,
    descent_samples: u64,
}

const SMALL: Plan = Plan {
    moment_dims: &[2, 10, 50],
    moment_thetas: &[0.0, 1.0, FRAC_PI_2],
    moment_samples: 200_000,
    inner_product_dims: &[100, 10_000],
    inner_product_samples: 2_000,
    angle_tail_dims: &[10, 100],
    angle_tail_samples: 2_000,
    descent_dim: 50,
    descent_samples: 10_000,
};

const FULL: Plan = Plan {
    moment_dims: &[2, 10, 50, 500],
    moment_thetas: &[0.0, 0.5, 1.0, 1.35, FRAC_PI_2],
    moment_samples: 200_000,
    inner_product_dims: &[100, 10_000],
    inner_product_samples: 10_000,
    angle_tail_dims: &[10, 100, 1000],
    angle_tail_samples: 10_000,
    descent_dim: 200,
    descent_samples: 100_000,
};

/// Runs every analysis check in sequence from one seeded stream.
pub fn run_suite(grid: SuiteGrid, seed: u64) -> Vec<Check> {
    let plan = match grid {
        SuiteGrid::Small => &SMALL,
        SuiteGrid::Full => &FULL,
    };
    let mut rng = RngStream::with_stream(seed, ANALYSIS_STREAM);
    let mut checks = Vec::new();

    for &d in plan.moment_dims {
        for &theta in plan.moment_thetas {
            let r = verify_cone_moments(d, theta, plan.moment_samples, &mut rng);
            let tag = format!("cone_moments/d{d}_theta{theta:.4}");
            checks.extend(r.checks.into_iter().map(|c| {
                let name = format!("{tag}/{}", c.name);
                c.with_name(name)
            }));
        }
    }

    let vanilla = verify_vanilla_moments(50, plan.moment_samples, &mut rng);
    checks.extend(vanilla.checks.into_iter().map(|c| {
        let name = format!("vanilla_moments/d50/{}", c.name);
        c.with_name(name)
    }));

    checks.push(second_moment_bound_grid());

    let mut medians = Vec::new();
    for &d in plan.inner_product_dims {
        let r = inner_product_concentration(d, plan.inner_product_samples, &mut rng);
        medians.push(r.median_abs);
        checks.extend(r.checks);
    }
    if let [low, high] = medians[..] {
        let ratio = low / high;
        let mut c = Check::upper("inner_product/median_ratio_le_13", ratio, 13.0, None, plan.inner_product_samples as u64);
        c.passed &= ratio >= 7.0;
        checks.push(c);
    }

    for &d in plan.angle_tail_dims {
        let r = angle_tail(d, 1.0, 0.9, plan.angle_tail_samples, &mut rng);
        let n = plan.angle_tail_samples as u64;
        checks.push(Check::upper(format!("angle_tail/d{d}/empirical_le_bound"), r.empirical, r.bound, None, n));
        checks.push(Check::upper(format!("angle_tail/d{d}/norm_error"), r.max_norm_error, 1e-10, None, n));
        let limit = match d {
            100 => Some(0.1),
            1000 => Some(1e-3),
            _ => None,
        };
        if let Some(limit) = limit {
            checks.push(Check::upper(format!("angle_tail/d{d}/tail_lt_{limit}"), r.empirical, limit, None, n));
        }
    }

    let d = plan.descent_dim;
    let f = make_benchmark_quadratic::<f64>(d, seed);
    let x = f.x0().clone();
    let a = f.grad(&x).expect("quadratic has a gradient");
    let ell = f.smoothness().expect("quadratic has a smoothness constant");
    for cos2 in [0.0, 0.25, 1.0] {
        let m = momentum_with_alignment(&a, cos2, &mut rng);
        for theta in [0.0, 1.3, FRAC_PI_2] {
            let eta = optimal_eta(cos2, theta, ell, d);
            let r = verify_descent(&f, &x, &m, theta, eta, plan.descent_samples, &mut rng);
            checks.push(r.check);
        }
    }

    checks.push(theta_star_consistency());
    checks
}

/// The exact second moment stays below the bound on a 10 × 10 × 20 grid of (d, ρ, θ).
fn second_moment_bound_grid() -> Check {
    let dims = [2usize, 3, 5, 10, 30, 100, 300, 1000, 10_000, 100_000];
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0u64;
    for &d in &dims {
        for j in 0..10 {
            let rho = FRAC_PI_2 * j as f64 / 9.0;
            let mut a = vec![0.0; d];
            let mut m = vec![0.0; d];
            m[0] = 1.0;
            a[0] = rho.cos();
            a[1] = rho.sin();
            for k in 0..20 {
                let theta = FRAC_PI_2 * k as f64 / 19.0;
                let s = cone_second_moment_exact(&a, &m, theta);
                worst = worst.max((s.exact - s.bound) / s.bound);
                count += 1;
            }
        }
    }
    Check::upper("cone_moments/exact_le_bound_grid", worst, 1e-12, None, count)
}

/// At the optimal step, θ = 0 beats θ = π/2 exactly when θ* says so.
fn theta_star_consistency() -> Check {
    let mut violations = 0u64;
    let mut count = 0u64;
    for d in [2usize, 10, 100, 1000, 10_000] {
        let boundary = (d as f64 + 4.0) / (d * d) as f64;
        for factor in [0.0, 0.1, 0.5, 0.9, 0.999, 1.001, 1.1, 2.0, 10.0, 1e3] {
            let cos2 = (boundary * factor).min(1.0);
            let (zero, half) = theta_star_margins(1.0, cos2, 2.0, d);
            let exploit = theta_star(cos2, d) == 0.0;
            if exploit != (zero < half) {
                violations += 1;
            }
            count += 1;
        }
    }
    Check::upper("descent/theta_star_consistency", violations as f64, 0.0, None, count)
}
