//! Dense vectors and the handful of kernels the optimizers need.
//!
//! Reductions (`dot`, `norm`) always accumulate sequentially from index 0 so
//! that two code paths touching the same data produce bitwise-identical sums.
//! Length mismatches are contract violations and panic.

use std::ops::{Deref, DerefMut};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn zeros(d: usize) -> Self {
        Self(vec![T::zero(); d])
    }

    pub fn from_vec(data: Vec<T>) -> Self {
        Self(data)
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize) -> T) -> Self {
        Self((0..d).map(f).collect())
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn dot(&self, other: &[T]) -> T {
        dot(&self.0, other)
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn norm_squared(&self) -> T {
        dot(&self.0, &self.0)
    }

    /// `self ← alpha·x + self`
    pub fn axpy(&mut self, alpha: T, x: &[T]) {
        axpy(alpha, x, &mut self.0);
    }

    pub fn scale(&mut self, alpha: T) {
        scale(alpha, &mut self.0);
    }

    pub fn scaled(mut self, alpha: T) -> Self {
        scale(alpha, &mut self.0);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Unit vector in the same direction, or `None` for a zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.clone().scaled(n.recip()))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64_lossy()).collect()
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for Vector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    assert_eq!(x.len(), y.len(), "dot: length mismatch");
    let mut acc = T::zero();
    for (a, b) in x.iter().zip(y) {
        acc = acc + *a * *b;
    }
    acc
}

#[inline]
pub fn norm<T: Scalar>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

/// `y ← alpha·x + y`
#[inline]
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    assert_eq!(x.len(), y.len(), "axpy: length mismatch");
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = alpha * *xi + *yi;
    }
}

#[inline]
pub fn scale<T: Scalar>(alpha: T, x: &mut [T]) {
    for v in x.iter_mut() {
        *v = alpha * *v;
    }
}
