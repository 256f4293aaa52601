//! Search-direction sampling.
//!
//! [`cone_direction_fast`] is the construction the optimizer uses:
//!
//! ```text
//! z = √d · (cos θ · m̂ + sin θ · u)
//! ```
//!
//! with `u` drawn from the whole sphere (or a raw Gaussian), not from the
//! orthogonal complement of `m̂`, and with the angle to the axis pinned at θ
//! instead of sampled. `z` is not renormalized, so `‖z‖² = d(1 + sin 2θ⟨m̂,u⟩)`.
//!
//! [`ExactConeSampler`] draws `z` uniformly from the cone ∩ √d·S^{d-1}: the
//! angle γ to the axis is drawn from the density ∝ sin^{d-1}(γ) on [0, θ] and
//! the lateral part from the unit sphere of `(m̂)^⊥`. It exists to check the
//! fast path and the concentration claims; the optimizers never call it.

use serde::{Deserialize, Serialize};

use crate::rng::RngStream;
use crate::scalar::{cone_trig, Scalar};
use crate::vector::{dot, norm, Vector};

/// Distribution of the random part `u` of a direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `u ~ U(S^{d-1})`, a normalized Gaussian draw.
    #[default]
    UnitSphere,
    /// `u ~ N(0, I_d)`, used without normalization.
    Gaussian,
}

/// Axes shorter than this are treated as zero.
pub const MIN_AXIS_NORM: f64 = 1e-300;

pub fn sample_gaussian<T: Scalar>(rng: &mut RngStream, d: usize) -> Vector<T> {
    let mut v = Vector::zeros(d);
    rng.fill_gaussian(&mut v);
    v
}

/// Uniform draw on S^{d-1}: a Gaussian vector scaled by the reciprocal of its norm.
pub fn sample_unit_sphere<T: Scalar>(rng: &mut RngStream, d: usize) -> Vector<T> {
    assert!(d >= 1, "dimension must be at least 1");
    let mut v = Vector::zeros(d);
    draw_u_into(rng, Direction::UnitSphere, &mut v);
    v
}

/// Fills `out` with `u` for the given distribution, redrawing an all-zero
/// Gaussian sample. Returns the scale that was applied to the raw draw.
pub(crate) fn draw_u_into<T: Scalar>(rng: &mut RngStream, dist: Direction, out: &mut [T]) -> T {
    loop {
        rng.fill_gaussian(out);
        let scale = match dist {
            Direction::Gaussian => return T::one(),
            Direction::UnitSphere => {
                let n = norm(out);
                if n == T::zero() {
                    continue;
                }
                n.recip()
            }
        };
        for v in out.iter_mut() {
            *v = *v * scale;
        }
        return scale;
    }
}

/// Locates the next usable direction draw without materializing it.
///
/// Returns `(counter, scale)` such that seeking to `counter` and multiplying
/// each regenerated Gaussian by `scale` yields exactly what
/// [`draw_u_into`] would have written. Leaves the stream just past the draw.
pub(crate) fn plan_u<T: Scalar>(rng: &mut RngStream, dist: Direction, d: usize) -> (u64, T) {
    let stride = RngStream::gaussian_stride(d);
    loop {
        let start = rng.counter();
        match dist {
            Direction::Gaussian => {
                rng.seek(start + stride);
                return (start, T::one());
            }
            Direction::UnitSphere => {
                // Same accumulation order as `vector::dot`.
                let mut acc = T::zero();
                for g in rng.gaussians(d) {
                    let v = T::of(g);
                    acc = acc + v * v;
                }
                let n = acc.sqrt();
                if n != T::zero() {
                    return (start, n.recip());
                }
            }
        }
    }
}

/// Precomputed coefficients of `z_i = √d · (cos θ · m_i/‖m‖ + sin θ · u_i)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ConeFrame<T> {
    pub sqrt_d: T,
    pub cos: T,
    pub sin: T,
    /// `1/‖m‖`, or zero when the axis is degenerate.
    pub inv_axis_norm: T,
    pub axis_norm: T,
}

impl<T: Scalar> ConeFrame<T> {
    pub fn new(theta: T, axis: &[T]) -> Self {
        let sqrt_d = T::of(axis.len() as f64).sqrt();
        let axis_norm = norm(axis);
        if !(axis_norm > T::of(MIN_AXIS_NORM)) || !axis_norm.is_finite() {
            // Degenerate axis: fall back to the plain sphere direction.
            return Self { sqrt_d, cos: T::zero(), sin: T::one(), inv_axis_norm: T::zero(), axis_norm };
        }
        let (cos, sin) = cone_trig(theta);
        Self { sqrt_d, cos, sin, inv_axis_norm: axis_norm.recip(), axis_norm }
    }

    pub fn is_degenerate(&self) -> bool {
        self.inv_axis_norm == T::zero()
    }

    #[inline(always)]
    pub fn coord(&self, m_i: T, u_i: T) -> T {
        self.sqrt_d * (self.cos * (m_i * self.inv_axis_norm) + self.sin * u_i)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConeDirectionSpec<'a, T> {
    /// Half-angle in [0, π/2].
    pub theta: T,
    /// Cone axis; any nonzero norm.
    pub axis: &'a [T],
    pub dist: Direction,
}

impl<'a, T: Scalar> ConeDirectionSpec<'a, T> {
    pub fn new(theta: T, axis: &'a [T]) -> Self {
        assert!(
            theta >= T::zero() && theta <= T::FRAC_PI_2(),
            "theta must lie in [0, pi/2], got {theta}"
        );
        Self { theta, axis, dist: Direction::UnitSphere }
    }

    pub fn with_dist(mut self, dist: Direction) -> Self {
        self.dist = dist;
        self
    }
}

/// The optimizer's cone direction. A zero axis falls back to `√d·u`.
pub fn cone_direction_fast<T: Scalar>(spec: &ConeDirectionSpec<'_, T>, rng: &mut RngStream) -> Vector<T> {
    let mut out = Vector::zeros(spec.axis.len());
    cone_direction_fast_into(spec, rng, &mut out);
    out
}

pub fn cone_direction_fast_into<T: Scalar>(
    spec: &ConeDirectionSpec<'_, T>,
    rng: &mut RngStream,
    out: &mut [T],
) {
    assert_eq!(out.len(), spec.axis.len(), "cone direction: length mismatch");
    let frame = ConeFrame::new(spec.theta, spec.axis);
    draw_u_into(rng, spec.dist, out);
    for (o, &m) in out.iter_mut().zip(spec.axis) {
        *o = frame.coord(m, *o);
    }
}

/// Uniform unit vector in `(axis)^⊥`: Gaussian draw, axis component projected out, normalized.
pub fn sample_orthogonal_complement<T: Scalar>(axis: &[T], rng: &mut RngStream) -> Vector<T> {
    let d = axis.len();
    assert!(d >= 2, "orthogonal complement needs d >= 2");
    let axis_hat = Vector::from_vec(axis.to_vec())
        .normalized()
        .expect("orthogonal complement of a zero axis");
    let mut w = Vector::zeros(d);
    loop {
        rng.fill_gaussian(&mut w);
        let raw = w.norm();
        let along = dot(&w, &axis_hat);
        w.axpy(-along, &axis_hat);
        // Second pass removes the rounding residue of the first.
        let along = dot(&w, &axis_hat);
        w.axpy(-along, &axis_hat);
        let n = w.norm();
        if n > raw * T::of(1e-8) {
            w.scale(n.recip());
            return w;
        }
    }
}

/// Inverse-CDF sampler for the angle between a uniform point on
/// cone ∩ √d·S^{d-1} and the cone axis.
///
/// The density ∝ sin^{d-1}(γ) on [0, θ] is evaluated in the log domain. Cell
/// masses on a uniform grid come from 8-point Gauss–Legendre quadrature;
/// inside a cell the density is shaped log-linearly (as a power law in the
/// first cell, where the log density is −∞ at γ = 0) and scaled to the cell
/// mass. Working in logs keeps the table accurate when the mass piles up
/// against γ = θ for large d.
#[derive(Clone, Debug)]
pub struct ExactConeSampler {
    d: usize,
    theta: f64,
    step: f64,
    /// Log density at the grid nodes, shifted so the value at θ is 0.
    log_density: Vec<f64>,
    /// Normalized mass of each cell.
    mass: Vec<f64>,
    /// Cumulative mass at the grid nodes, ending at 1.
    cdf: Vec<f64>,
}

const GAUSS_LEGENDRE_8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
];

impl ExactConeSampler {
    pub const GRID_CELLS: usize = 4096;

    pub fn new(d: usize, theta: f64) -> Self {
        assert!(d >= 2, "exact cone sampling needs d >= 2");
        assert!(
            theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2,
            "exact cone sampling needs theta in (0, pi/2], got {theta}"
        );
        let n = Self::GRID_CELLS;
        let step = theta / n as f64;
        let power = (d - 1) as f64;
        let top = power * theta.sin().ln();
        let log_at = |g: f64| power * g.sin().ln() - top;
        let node = |k: usize| if k == n { theta } else { k as f64 * step };
        let log_density: Vec<f64> = (0..=n).map(|k| log_at(node(k))).collect();
        let mut mass: Vec<f64> = (0..n)
            .map(|k| {
                let mid = node(k) + 0.5 * step;
                let half = 0.5 * step;
                GAUSS_LEGENDRE_8
                    .iter()
                    .map(|&(x, w)| w * (log_at(mid - half * x).exp() + log_at(mid + half * x).exp()))
                    .sum::<f64>()
                    * half
            })
            .collect();
        let total: f64 = mass.iter().sum();
        let mut cdf = vec![0.0; n + 1];
        for k in 0..n {
            mass[k] /= total;
            cdf[k + 1] = cdf[k] + mass[k];
        }
        for c in cdf.iter_mut() {
            *c = c.min(1.0);
        }
        cdf[n] = 1.0;
        Self { d, theta, step, log_density, mass, cdf }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Fraction of cell `k`'s mass lying within its first `t ∈ [0, h]`.
    fn cell_fraction(&self, k: usize, t: f64) -> f64 {
        let (l0, l1) = (self.log_density[k], self.log_density[k + 1]);
        let h = self.step;
        if t <= 0.0 {
            return 0.0;
        }
        if t >= h {
            return 1.0;
        }
        if l0 == f64::NEG_INFINITY {
            (t / h).powf(self.d as f64)
        } else {
            let slope = (l1 - l0) / h;
            if slope.abs() * h < 1e-12 {
                t / h
            } else {
                (slope * t).exp_m1() / (slope * h).exp_m1()
            }
        }
    }

    /// Inverse of [`Self::cell_fraction`].
    fn cell_offset(&self, k: usize, q: f64) -> f64 {
        let (l0, l1) = (self.log_density[k], self.log_density[k + 1]);
        let h = self.step;
        let q = q.clamp(0.0, 1.0);
        if l0 == f64::NEG_INFINITY {
            h * q.powf(1.0 / self.d as f64)
        } else {
            let slope = (l1 - l0) / h;
            if slope.abs() * h < 1e-12 {
                q * h
            } else {
                (q * (slope * h).exp_m1()).ln_1p() / slope
            }
        }
    }

    /// `P(γ ≤ g)` under the tabulated density.
    pub fn cdf(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        if g >= self.theta {
            return 1.0;
        }
        let k = ((g / self.step) as usize).min(Self::GRID_CELLS - 1);
        let t = g - k as f64 * self.step;
        (self.cdf[k] + self.mass[k] * self.cell_fraction(k, t)).min(1.0)
    }

    /// Inverts the tabulated CDF at `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = Self::GRID_CELLS;
        // Last node with cdf ≤ p, skipping empty cells.
        let k = self.cdf.partition_point(|&c| c <= p).clamp(1, n) - 1;
        let k = (k..n).find(|&j| self.mass[j] > 0.0).unwrap_or(n - 1);
        let q = if self.mass[k] > 0.0 { (p - self.cdf[k]) / self.mass[k] } else { 0.0 };
        (k as f64 * self.step + self.cell_offset(k, q)).min(self.theta)
    }

    pub fn sample_angle(&self, rng: &mut RngStream) -> f64 {
        self.quantile(rng.next_open01())
    }

    /// Uniform draw from cone ∩ √d·S^{d-1} around `axis`.
    pub fn sample<T: Scalar>(&self, axis: &[T], rng: &mut RngStream) -> Vector<T> {
        assert_eq!(axis.len(), self.d, "exact cone sampler: dimension mismatch");
        let gamma = self.sample_angle(rng);
        let lateral = sample_orthogonal_complement(axis, rng);
        compose_on_sphere(axis, &lateral, gamma)
    }
}

fn compose_on_sphere<T: Scalar>(axis: &[T], lateral: &[T], gamma: f64) -> Vector<T> {
    let d = axis.len();
    let sqrt_d = T::of(d as f64).sqrt();
    let axis_hat = Vector::from_vec(axis.to_vec()).normalized().expect("zero cone axis");
    let (s, c) = gamma.sin_cos();
    let (s, c) = (T::of(s), T::of(c));
    Vector::from_fn(d, |i| sqrt_d * (c * axis_hat[i] + s * lateral[i]))
}

/// Convenience wrapper building a fresh [`ExactConeSampler`] per call.
///
/// `theta = 0` returns `√d·m̂`; `d = 1` is a contract violation.
pub fn cone_direction_exact<T: Scalar>(theta: f64, axis: &[T], rng: &mut RngStream) -> Vector<T> {
    let d = axis.len();
    assert!(d >= 2, "exact cone sampling needs d >= 2");
    if theta == 0.0 {
        let sqrt_d = T::of(d as f64).sqrt();
        return Vector::from_vec(axis.to_vec()).normalized().expect("zero cone axis").scaled(sqrt_d);
    }
    ExactConeSampler::new(d, theta).sample(axis, rng)
}

/// Analytic upper bound on `P(γ ≤ θ')` for a uniform point on the cone of
/// half-angle θ in dimension d: `θ'/(θ−s) · (sin θ'/sin s)^{d−1}` with `s = (θ+θ')/2`.
pub fn angle_tail_bound(theta: f64, theta_prime: f64, d: usize) -> f64 {
    assert!(0.0 < theta_prime && theta_prime < theta, "need 0 < theta' < theta");
    let s = 0.5 * (theta + theta_prime);
    let log_ratio = (theta_prime.sin() / s.sin()).ln() * (d - 1) as f64;
    theta_prime / (theta - s) * log_ratio.exp()
}

/// Angle between `v` and the unit vector `axis_hat`, in [0, π].
pub fn angle_to_axis<T: Scalar>(v: &[T], axis_hat: &[T]) -> f64 {
    let c = (dot(v, axis_hat) / norm(v)).to_f64_lossy();
    c.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn axis(d: usize, seed: u64) -> Vector<f64> {
        let mut rng = RngStream::with_stream(seed, 9);
        sample_gaussian(&mut rng, d).scaled(3.7)
    }

    #[test]
    fn unit_sphere_norm_is_one() {
        for d in [1usize, 2, 10, 1000, 1_000_000] {
            let mut rng = RngStream::new(d as u64);
            let u: Vector<f64> = sample_unit_sphere(&mut rng, d);
            assert!((u.norm() - 1.0).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn plan_matches_materialized_draw() {
        for dist in [Direction::UnitSphere, Direction::Gaussian] {
            let mut a = RngStream::new(4);
            let mut b = RngStream::new(4);
            let mut buf = vec![0.0_f64; 9];
            let scale = draw_u_into(&mut a, dist, &mut buf);
            let (start, planned) = plan_u::<f64>(&mut b, dist, 9);
            assert_eq!(scale.to_bits(), planned.to_bits());
            assert_eq!(a.counter(), b.counter());
            b.seek(start);
            for (g, u) in b.gaussians(9).zip(&buf) {
                assert_eq!((g * planned).to_bits(), u.to_bits());
            }
        }
    }

    #[test]
    fn half_pi_reduces_to_scaled_sphere_draw() {
        let d = 64;
        let m = axis(d, 1);
        let spec = ConeDirectionSpec::new(FRAC_PI_2, &m);
        let z = cone_direction_fast(&spec, &mut RngStream::new(8));
        let u: Vector<f64> = sample_unit_sphere(&mut RngStream::new(8), d);
        let sqrt_d = (d as f64).sqrt();
        for (zi, ui) in z.iter().zip(u.iter()) {
            assert_eq!(zi.to_bits(), (sqrt_d * ui).to_bits());
        }
        assert!((z.norm() - sqrt_d).abs() < 1e-12);
    }

    #[test]
    fn zero_theta_is_pure_axis() {
        let d = 50;
        let m = axis(d, 2);
        let spec = ConeDirectionSpec::new(0.0, &m);
        let z1 = cone_direction_fast(&spec, &mut RngStream::new(1));
        let z2 = cone_direction_fast(&spec, &mut RngStream::new(2));
        assert_eq!(z1, z2);
        let expected = m.normalized().unwrap().scaled((d as f64).sqrt());
        for (a, b) in z1.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_axis_falls_back_to_sphere() {
        let m = Vector::<f64>::zeros(16);
        let z = cone_direction_fast(&ConeDirectionSpec::new(0.3, &m), &mut RngStream::new(3));
        assert!(z.is_finite());
        assert!((z.norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fast_direction_norm_identity() {
        let d = 200;
        let m = axis(d, 3);
        let m_hat = m.normalized().unwrap();
        let theta = 0.9;
        let mut rng = RngStream::new(5);
        for _ in 0..20 {
            let before = rng.counter();
            let z = cone_direction_fast(&ConeDirectionSpec::new(theta, &m), &mut rng);
            rng.seek(before);
            let u: Vector<f64> = sample_unit_sphere(&mut rng, d);
            let expected = d as f64 * (1.0 + (2.0 * theta).sin() * m_hat.dot(&u));
            assert!((z.norm_squared() - expected).abs() < 1e-9 * d as f64);
        }
    }

    #[test]
    fn gaussian_mode_uses_raw_draw() {
        let d = 10;
        let m = axis(d, 4);
        let spec = ConeDirectionSpec::new(FRAC_PI_2, &m).with_dist(Direction::Gaussian);
        let z = cone_direction_fast(&spec, &mut RngStream::new(6));
        let g: Vector<f64> = sample_gaussian(&mut RngStream::new(6), d);
        let sqrt_d = (d as f64).sqrt();
        for (zi, gi) in z.iter().zip(g.iter()) {
            assert_eq!(*zi, sqrt_d * gi);
        }
    }

    #[test]
    fn orthogonal_complement_basics() {
        let e1 = [1.0, 0.0, 0.0];
        let mut rng = RngStream::new(7);
        for _ in 0..100 {
            let w: Vector<f64> = sample_orthogonal_complement(&e1, &mut rng);
            assert!(w[0].abs() < 1e-10);
            assert!((w.norm() - 1.0).abs() < 1e-10);
        }
        let m = axis(300, 5);
        for _ in 0..50 {
            let w = sample_orthogonal_complement(&m, &mut rng);
            assert!(w.dot(&m).abs() < 1e-10 * m.norm());
            assert!((w.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_sampler_lands_on_sphere_inside_cone() {
        let mut rng = RngStream::new(10);
        for (d, theta) in [(2usize, 0.4), (3, 1.0), (50, 1.35), (1000, FRAC_PI_2)] {
            let m = axis(d, d as u64);
            let m_hat = m.normalized().unwrap();
            let sampler = ExactConeSampler::new(d, theta);
            for _ in 0..200 {
                let z = sampler.sample(&m, &mut rng);
                assert!((z.norm() - (d as f64).sqrt()).abs() < 1e-10);
                assert!(angle_to_axis(&z, &m_hat) <= theta + 1e-9);
            }
        }
    }

    #[test]
    fn exact_zero_theta_is_axis() {
        let m = axis(5, 6);
        let z = cone_direction_exact(0.0, &m, &mut RngStream::new(0));
        let expected = m.normalized().unwrap().scaled(5f64.sqrt());
        assert_eq!(z, expected);
    }

    #[test]
    #[should_panic(expected = "d >= 2")]
    fn exact_rejects_one_dimension() {
        cone_direction_exact(0.5, &[1.0], &mut RngStream::new(0));
    }

    #[test]
    fn tabulated_cdf_matches_closed_forms() {
        // d = 2: density ∝ sin γ on [0, θ] ⇒ F(γ) = (1 − cos γ)/(1 − cos θ).
        let s = ExactConeSampler::new(2, FRAC_PI_2);
        for g in [0.01, 0.2, 0.7, 1.2, 1.5] {
            assert!((s.cdf(g) - (1.0 - g.cos())).abs() < 1e-9, "g={g}");
        }
        // d = 3: density ∝ sin² γ ⇒ F ∝ γ/2 − sin 2γ/4.
        let theta = 1.1;
        let s = ExactConeSampler::new(3, theta);
        let prim = |g: f64| g / 2.0 - (2.0 * g).sin() / 4.0;
        for g in [0.05, 0.5, 1.0] {
            assert!((s.cdf(g) - prim(g) / prim(theta)).abs() < 1e-9, "g={g}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for (d, theta) in [(2usize, 1.0), (10, 0.8), (1000, 1.0), (10_000, 1.35)] {
            let s = ExactConeSampler::new(d, theta);
            for p in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999] {
                let g = s.quantile(p);
                assert!((s.cdf(g) - p).abs() < 1e-9, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn tail_bound_dominates_tabulated_tail() {
        for d in [10usize, 100, 1000] {
            let s = ExactConeSampler::new(d, 1.0);
            assert!(s.cdf(0.9) <= angle_tail_bound(1.0, 0.9, d));
        }
    }
}
