use serde::{Deserialize, Serialize};

use super::moments::cone_first_moment_analytic;
use super::stats::Welford;
use super::Check;
use crate::estimator::Objective;
use crate::rng::RngStream;
use crate::sampling::{cone_direction_fast_into, sample_orthogonal_complement, ConeDirectionSpec};
use crate::scalar::cone_trig;
use crate::vector::{dot, norm, Vector};

/// `(d cos²θ cos²ρ + sin²θ, d((d+4) cos²θ cos²ρ + sin²θ))`
fn coefficients(cos2_rho: f64, theta: f64, d: usize) -> (f64, f64) {
    let d = d as f64;
    let (c, s) = cone_trig(theta);
    let (c2, s2) = (c * c, s * s);
    (d * c2 * cos2_rho + s2, d * ((d + 4.0) * c2 * cos2_rho + s2))
}

/// Upper bound on `E f(x₊)` after one λ→0 step:
/// `f − η(d c² cos²ρ + s²)‖a‖² + (η²ℓ/2) d((d+4) c² cos²ρ + s²)‖a‖²`.
pub fn descent_rhs(f_x: f64, grad_norm2: f64, cos2_rho: f64, theta: f64, eta: f64, ell: f64, d: usize) -> f64 {
    let (first, second) = coefficients(cos2_rho, theta, d);
    f_x - eta * first * grad_norm2 + 0.5 * eta * eta * ell * second * grad_norm2
}

/// Step size minimizing [`descent_rhs`]. Zero when the bound has no
/// curvature (`θ = 0` with `cos²ρ = 0`, where the step cannot make progress).
pub fn optimal_eta(cos2_rho: f64, theta: f64, ell: f64, d: usize) -> f64 {
    let (first, second) = coefficients(cos2_rho, theta, d);
    if second == 0.0 {
        0.0
    } else {
        first / (ell * second)
    }
}

/// `−(d c² cos²ρ + s²)/(2ℓd) · ‖a‖²`, the simplified decrease at the optimal step.
pub fn first_order_decrease(grad_norm2: f64, cos2_rho: f64, theta: f64, ell: f64, d: usize) -> f64 {
    let (first, _) = coefficients(cos2_rho, theta, d);
    -first / (2.0 * ell * d as f64) * grad_norm2
}

/// Bound values at the optimal step for `θ = 0` and `θ = π/2`, in that order.
pub fn theta_star_margins(grad_norm2: f64, cos2_rho: f64, ell: f64, d: usize) -> (f64, f64) {
    let at = |theta: f64| {
        let eta = optimal_eta(cos2_rho, theta, ell, d);
        descent_rhs(0.0, grad_norm2, cos2_rho, theta, eta, ell, d)
    };
    (at(0.0), at(std::f64::consts::FRAC_PI_2))
}

/// A vector at the prescribed squared cosine with `a`: `cos ρ·â + sin ρ·w`,
/// `w` a uniform unit vector orthogonal to `a`.
pub fn momentum_with_alignment(a: &[f64], cos2_rho: f64, rng: &mut RngStream) -> Vector<f64> {
    assert!((0.0..=1.0).contains(&cos2_rho), "cos2_rho must lie in [0, 1]");
    let a_hat = Vector::from_vec(a.to_vec()).normalized().expect("zero gradient");
    let w: Vector<f64> = sample_orthogonal_complement(a, rng);
    let (c, s) = (cos2_rho.sqrt(), (1.0 - cos2_rho).sqrt());
    Vector::from_fn(a.len(), |i| c * a_hat[i] + s * w[i])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentReport {
    pub d: usize,
    pub theta: f64,
    pub eta: f64,
    pub cos2_rho: f64,
    pub f_x: f64,
    /// Right-hand side of the descent inequality.
    pub rhs: f64,
    pub empirical_mean: f64,
    pub std_error: f64,
    /// `E f(x₊) − f(x)` observed.
    pub realized_decrease: f64,
    /// [`first_order_decrease`] at the same point.
    pub approx_decrease: f64,
    /// Observed and closed-form `E[a·g]`.
    pub linear_term: (f64, f64),
    pub check: Check,
}

/// Monte-Carlo estimate of `E f(x − η(z·a)z)` over cone draws around `m`,
/// with `a = ∇f(x)` and `ℓ` from [`Objective::smoothness`].
pub fn verify_descent<F: Objective<f64> + ?Sized>(
    f: &F,
    x: &[f64],
    m: &[f64],
    theta: f64,
    eta: f64,
    n_samples: u64,
    rng: &mut RngStream,
) -> DescentReport {
    let d = x.len();
    let a = f.grad(x).expect("descent check needs an analytic gradient");
    let ell = f.smoothness().expect("descent check needs a smoothness constant");
    let a2 = dot(&a, &a);
    let m_hat = Vector::from_vec(m.to_vec()).normalized().expect("zero momentum");
    let ma = dot(&m_hat, &a);
    let cos2_rho = (ma * ma / a2).min(1.0);
    let f_x = f.value(x);
    let rhs = descent_rhs(f_x, a2, cos2_rho, theta, eta, ell, d);

    let spec = ConeDirectionSpec::new(theta, &m_hat);
    let mut z = vec![0.0; d];
    let mut x_next = vec![0.0; d];
    let mut values = Welford::new();
    let mut linear = Welford::new();
    for _ in 0..n_samples {
        cone_direction_fast_into(&spec, rng, &mut z);
        let c = dot(&z, &a);
        for ((xn, &xi), &zi) in x_next.iter_mut().zip(x).zip(&z) {
            *xn = xi - eta * (c * zi);
        }
        values.push(f.value(&x_next));
        linear.push(c * c);
    }
    let expected_linear = dot(&a, &cone_first_moment_analytic(&a, &m_hat, theta));
    let se = values.std_error();
    let floor = 1e-12 * f_x.abs().max(norm(&a) * norm(x)).max(1.0);
    let mut check = Check::upper(
        format!("descent/d{d}_cos2rho{cos2_rho:.2}_theta{theta:.4}"),
        values.mean(),
        rhs + 5.0 * se + floor,
        (se > 0.0).then(|| (values.mean() - rhs) / se),
        n_samples,
    );
    check.std_error = Some(se);
    DescentReport {
        d,
        theta,
        eta,
        cos2_rho,
        f_x,
        rhs,
        empirical_mean: values.mean(),
        std_error: se,
        realized_decrease: values.mean() - f_x,
        approx_decrease: first_order_decrease(a2, cos2_rho, theta, ell, d),
        linear_term: (linear.mean(), expected_linear),
        check,
    }
}
