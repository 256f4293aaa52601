//! Test objectives with analytic gradients and known optima.

use crate::estimator::Objective;
use crate::rng::{RngStream, INIT_STREAM};
use crate::sampling::sample_unit_sphere;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Separable quadratic `f(x) = Σ σ_i x_i²` with a fixed starting point.
#[derive(Clone, Debug)]
pub struct Quadratic<T> {
    sigma: Vector<T>,
    x0: Vector<T>,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(sigma: Vec<T>, x0: Vec<T>) -> Self {
        assert_eq!(sigma.len(), x0.len(), "quadratic: sigma and x0 lengths differ");
        assert!(sigma.iter().all(|&s| s > T::zero()), "quadratic: sigma must be positive");
        Self { sigma: sigma.into(), x0: x0.into() }
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn x0(&self) -> &Vector<T> {
        &self.x0
    }

    pub fn condition_number(&self) -> T {
        let (lo, hi) = self
            .sigma
            .iter()
            .fold((T::infinity(), T::zero()), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        hi / lo
    }
}

impl<T: Scalar> Objective<T> for Quadratic<T> {
    fn dim(&self) -> usize {
        self.sigma.len()
    }

    fn value(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for (&s, &xi) in self.sigma.iter().zip(x) {
            acc = acc + s * xi * xi;
        }
        acc
    }

    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        let two = T::of(2.0);
        Some(Vector::from_fn(x.len(), |i| two * self.sigma[i] * x[i]))
    }

    fn minimum(&self) -> Option<T> {
        Some(T::zero())
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::zeros(self.dim()))
    }

    fn smoothness(&self) -> Option<T> {
        let hi = self.sigma.iter().fold(T::zero(), |hi, &s| hi.max(s));
        Some(T::of(2.0) * hi)
    }
}

/// Geometric spectrum from `1/d` up to `1`, ascending in index order:
/// `σ_i = (1/d) · d^{(i−1)/(d−1)}`.
pub fn geometric_spectrum<T: Scalar>(d: usize) -> Vec<T> {
    assert!(d >= 2, "geometric spectrum needs d >= 2");
    let df = d as f64;
    (0..d)
        .map(|i| {
            if i == d - 1 {
                T::one()
            } else {
                T::of(df.powf(i as f64 / (df - 1.0)) / df)
            }
        })
        .collect()
}

/// The synthetic benchmark: condition number `d`, `‖x₀‖ = 10`, `x₀` drawn
/// uniformly on the sphere from `init_seed`.
pub fn make_benchmark_quadratic<T: Scalar>(d: usize, init_seed: u64) -> Quadratic<T> {
    make_quadratic(d, 10.0, init_seed)
}

pub fn make_quadratic<T: Scalar>(d: usize, x0_norm: f64, init_seed: u64) -> Quadratic<T> {
    let mut rng = RngStream::with_stream(init_seed, INIT_STREAM);
    let x0: Vector<T> = sample_unit_sphere::<T>(&mut rng, d).scaled(T::of(x0_norm));
    Quadratic::new(geometric_spectrum(d), x0.into_vec())
}

/// Random starting point of a given norm, reproducible from `init_seed`.
pub fn random_start<T: Scalar>(d: usize, radius: f64, init_seed: u64) -> Vector<T> {
    let mut rng = RngStream::with_stream(init_seed, INIT_STREAM);
    sample_unit_sphere::<T>(&mut rng, d).scaled(T::of(radius))
}

/// `f(x) = ‖x‖²`
#[derive(Clone, Debug)]
pub struct Sphere {
    d: usize,
}

impl Sphere {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1);
        Self { d }
    }
}

pub fn make_sphere(d: usize) -> Sphere {
    assert!(d >= 2, "sphere objective needs d >= 2");
    Sphere::new(d)
}

impl<T: Scalar> Objective<T> for Sphere {
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[T]) -> T {
        crate::vector::dot(x, x)
    }
    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        let two = T::of(2.0);
        Some(Vector::from_fn(x.len(), |i| two * x[i]))
    }
    fn minimum(&self) -> Option<T> {
        Some(T::zero())
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::zeros(self.d))
    }
    fn smoothness(&self) -> Option<T> {
        Some(T::of(2.0))
    }
}

/// `f(x) = Σ_{i<d−1} 100(x_{i+1} − x_i²)² + (1 − x_i)²`
#[derive(Clone, Debug)]
pub struct Rosenbrock {
    d: usize,
}

impl Rosenbrock {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "rosenbrock needs d >= 2");
        Self { d }
    }

    /// The customary start `(−1.2, 1, −1.2, 1, …)`.
    pub fn standard_start<T: Scalar>(&self) -> Vector<T> {
        Vector::from_fn(self.d, |i| if i % 2 == 0 { T::of(-1.2) } else { T::one() })
    }
}

pub fn make_rosenbrock(d: usize) -> Rosenbrock {
    Rosenbrock::new(d)
}

impl<T: Scalar> Objective<T> for Rosenbrock {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[T]) -> T {
        let hundred = T::of(100.0);
        let mut acc = T::zero();
        for w in x.windows(2) {
            let a = w[1] - w[0] * w[0];
            let b = T::one() - w[0];
            acc = acc + hundred * a * a + b * b;
        }
        acc
    }

    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        let mut g = Vector::zeros(x.len());
        let (two, four_hundred, two_hundred) = (T::of(2.0), T::of(400.0), T::of(200.0));
        for i in 0..x.len() - 1 {
            let a = x[i + 1] - x[i] * x[i];
            g[i] = g[i] - four_hundred * x[i] * a - two * (T::one() - x[i]);
            g[i + 1] = g[i + 1] + two_hundred * a;
        }
        Some(g)
    }

    fn minimum(&self) -> Option<T> {
        Some(T::zero())
    }

    fn minimizer(&self) -> Option<Vector<T>> {
        Some(Vector::from_vec(vec![T::one(); self.d]))
    }
}

/// `f(x) = c·x`
#[derive(Clone, Debug)]
pub struct Linear<T> {
    c: Vector<T>,
}

impl<T: Scalar> Linear<T> {
    pub fn new(c: Vec<T>) -> Self {
        Self { c: c.into() }
    }
}

impl<T: Scalar> Objective<T> for Linear<T> {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[T]) -> T {
        self.c.dot(x)
    }
    fn grad(&self, _x: &[T]) -> Option<Vector<T>> {
        Some(self.c.clone())
    }
    fn smoothness(&self) -> Option<T> {
        Some(T::zero())
    }
}

/// Constant-time value oracle for timing the optimizer's own vector work.
#[derive(Clone, Debug)]
pub struct Constant {
    d: usize,
    value: f64,
}

impl Constant {
    pub fn new(d: usize, value: f64) -> Self {
        Self { d, value }
    }
}

impl<T: Scalar> Objective<T> for Constant {
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, _x: &[T]) -> T {
        T::of(self.value)
    }
    fn grad(&self, _x: &[T]) -> Option<Vector<T>> {
        Some(Vector::zeros(self.d))
    }
    fn minimum(&self) -> Option<T> {
        Some(T::of(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_quadratic_shape() {
        let q: Quadratic<f64> = make_benchmark_quadratic(1000, 3);
        assert_eq!(q.condition_number(), 1000.0);
        assert_eq!(q.sigma()[999], 1.0);
        assert!((q.sigma()[0] - 1e-3).abs() < 1e-18);
        assert!(q.sigma().windows(2).all(|w| w[0] < w[1]));
        assert!((q.x0().norm() - 10.0).abs() < 1e-10);
        let f0 = q.value(q.x0());
        assert!(f0 > 0.1 && f0 < 100.0);
        assert_eq!(q.smoothness(), Some(2.0));
    }

    #[test]
    fn benchmark_quadratic_is_seed_deterministic() {
        let a: Quadratic<f64> = make_benchmark_quadratic(50, 9);
        let b: Quadratic<f64> = make_benchmark_quadratic(50, 9);
        let c: Quadratic<f64> = make_benchmark_quadratic(50, 10);
        assert_eq!(a.x0(), b.x0());
        assert_ne!(a.x0(), c.x0());
    }

    #[test]
    fn small_cases() {
        let s = make_sphere(2);
        assert_eq!(Objective::<f64>::grad(&s, &[1.0, 2.0]).unwrap().as_slice(), &[2.0, 4.0]);
        let r = make_rosenbrock(4);
        assert_eq!(Objective::<f64>::value(&r, &[1.0; 4]), 0.0);
        assert_eq!(Objective::<f64>::grad(&r, &[1.0; 4]).unwrap().as_slice(), &[0.0; 4]);
    }

    #[test]
    fn f32_instantiation() {
        let q: Quadratic<f32> = make_benchmark_quadratic(100, 1);
        assert!((q.x0().norm() - 10.0).abs() < 1e-4);
    }
}
