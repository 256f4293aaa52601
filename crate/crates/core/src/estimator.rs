//! Two-point zeroth-order gradient estimation.
//!
//! `g_λ(x, z) = (f(x + λz) − f(x − λz)) / (2λ) · z`
//!
//! [`zoge`] evaluates the two points in a scratch buffer, so `x` is never
//! touched. The optimizers use the in-place variant
//! ([`zoge_coefficient_in_place`]) which perturbs `x` by `+λz`, `−2λz`, `+λz`
//! using the same stored product `λz_i` each time; the restored iterate equals
//! the original up to the rounding of those three additions.

use std::cell::Cell;

use crate::error::{Side, StepError};
use crate::scalar::Scalar;
use crate::vector::{dot, Vector};

/// A function-value oracle, optionally with an analytic gradient for verification.
pub trait Objective<T: Scalar> {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    fn grad(&self, _x: &[T]) -> Option<Vector<T>> {
        None
    }

    /// Known minimum value `f*`.
    fn minimum(&self) -> Option<T> {
        None
    }

    /// Known minimizer `x*`.
    fn minimizer(&self) -> Option<Vector<T>> {
        None
    }

    /// Lipschitz constant of the gradient, when known.
    fn smoothness(&self) -> Option<T> {
        None
    }
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        (**self).grad(x)
    }
    fn minimum(&self) -> Option<T> {
        (**self).minimum()
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        (**self).minimizer()
    }
    fn smoothness(&self) -> Option<T> {
        (**self).smoothness()
    }
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        (**self).grad(x)
    }
    fn minimum(&self) -> Option<T> {
        (**self).minimum()
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        (**self).minimizer()
    }
    fn smoothness(&self) -> Option<T> {
        (**self).smoothness()
    }
}

/// Counts `value()` calls. Not `Sync`: one instance per run.
#[derive(Debug)]
pub struct Counted<O> {
    inner: O,
    evals: Cell<u64>,
}

impl<O> Counted<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, evals: Cell::new(0) }
    }

    pub fn evals(&self) -> u64 {
        self.evals.get()
    }

    pub fn reset(&self) {
        self.evals.set(0);
    }

    /// The wrapped objective; calls through it are not counted.
    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<T: Scalar, O: Objective<T>> Objective<T> for Counted<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[T]) -> T {
        self.evals.set(self.evals.get() + 1);
        self.inner.value(x)
    }
    fn grad(&self, x: &[T]) -> Option<Vector<T>> {
        self.inner.grad(x)
    }
    fn minimum(&self) -> Option<T> {
        self.inner.minimum()
    }
    fn minimizer(&self) -> Option<Vector<T>> {
        self.inner.minimizer()
    }
    fn smoothness(&self) -> Option<T> {
        self.inner.smoothness()
    }
}

/// Values at the two probe points and the resulting directional coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoint<T> {
    pub f_plus: T,
    pub f_minus: T,
    /// `(f(x+λz) − f(x−λz)) / (2λ)`
    pub coefficient: T,
}

fn check<T: Scalar>(value: T, side: Side, step: u64, point: &[T]) -> Result<T, StepError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(StepError::NonFiniteValue {
            step,
            side,
            value: value.to_f64_lossy(),
            point: point.iter().map(|v| v.to_f64_lossy()).collect(),
        })
    }
}

#[inline]
fn coefficient<T: Scalar>(f_plus: T, f_minus: T, lambda: T) -> T {
    (f_plus - f_minus) / (lambda + lambda)
}

/// Directional coefficient of the two-point estimate, evaluated out of place.
pub fn zoge_coefficient<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    x: &[T],
    z: &[T],
    lambda: T,
) -> Result<TwoPoint<T>, StepError> {
    assert_eq!(x.len(), z.len(), "zoge: length mismatch");
    assert!(lambda > T::zero(), "zoge: smoothing must be positive");
    let mut probe: Vec<T> = x.iter().zip(z).map(|(&xi, &zi)| xi + lambda * zi).collect();
    let f_plus = check(f.value(&probe), Side::Plus, 0, &probe)?;
    for ((p, &xi), &zi) in probe.iter_mut().zip(x).zip(z) {
        *p = xi - lambda * zi;
    }
    let f_minus = check(f.value(&probe), Side::Minus, 0, &probe)?;
    Ok(TwoPoint { f_plus, f_minus, coefficient: coefficient(f_plus, f_minus, lambda) })
}

/// `g_λ(x, z)`; exactly two `value()` calls, `x` untouched.
pub fn zoge<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    x: &[T],
    z: &[T],
    lambda: T,
) -> Result<Vector<T>, StepError> {
    let tp = zoge_coefficient(f, x, z, lambda)?;
    Ok(Vector::from_vec(z.to_vec()).scaled(tp.coefficient))
}

/// Two-point coefficient with `x` perturbed in place and restored.
///
/// `perturb(x, s)` must add `s·p_i` to every `x_i`, where `p_i = λz_i` is
/// computed identically on every call. It is called with `s = 1, −2, 1`; on an
/// error the pending perturbation is undone before returning. `step` only
/// labels errors.
pub fn zoge_coefficient_in_place<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    x: &mut [T],
    lambda: T,
    step: u64,
    mut perturb: impl FnMut(&mut [T], T),
) -> Result<TwoPoint<T>, StepError> {
    perturb(x, T::one());
    let f_plus = f.value(x);
    let plus = check(f_plus, Side::Plus, step, x);
    let f_minus = match plus {
        Ok(_) => {
            perturb(x, -T::of(2.0));
            let v = f.value(x);
            let r = check(v, Side::Minus, step, x);
            perturb(x, T::one());
            r?
        }
        Err(e) => {
            perturb(x, -T::one());
            return Err(e);
        }
    };
    Ok(TwoPoint { f_plus, f_minus, coefficient: coefficient(f_plus, f_minus, lambda) })
}

/// `(z·∇f(x))·z`, the λ→0 limit of the estimator. Requires an analytic gradient.
pub fn zoge_limit<T: Scalar, F: Objective<T> + ?Sized>(f: &F, x: &[T], z: &[T]) -> Vector<T> {
    let g = f.grad(x).expect("zoge_limit requires an analytic gradient");
    let c = dot(z, &g);
    Vector::from_vec(z.to_vec()).scaled(c)
}
