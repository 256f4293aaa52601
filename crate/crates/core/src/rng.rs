//! Counter-addressable random stream.
//!
//! A stream is identified by `(seed, stream)` and positioned by a counter of
//! 64-bit words consumed. Seeking back to a recorded counter replays the exact
//! same draws, which is what the seed-replay memory strategy relies on.
//!
//! Draw costs, in 64-bit words:
//!
//! | draw                         | words            |
//! |------------------------------|------------------|
//! | `next_u64`, `next_open01`    | 1                |
//! | Gaussian vector of length d  | `d + (d % 2)`    |
//!
//! Gaussians come in Box–Muller pairs built from two consecutive words; an
//! odd-length vector burns the unused half of its last pair.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::scalar::Scalar;

/// Stream id used for the optimizer's direction draws.
pub const OPTIMIZER_STREAM: u64 = 0;
/// Stream id used for problem initialization (e.g. the starting iterate).
pub const INIT_STREAM: u64 = 1;
/// Stream id used by the Monte-Carlo verification routines.
pub const ANALYSIS_STREAM: u64 = 2;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    counter: u64,
    core: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, OPTIMIZER_STREAM)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut core = ChaCha8Rng::seed_from_u64(seed);
        core.set_stream(stream);
        Self { seed, stream, counter: 0, core }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 64-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Repositions the stream; the next draw is the one originally made at `counter`.
    pub fn seek(&mut self, counter: u64) {
        self.counter = counter;
        self.core.set_word_pos(2 * counter as u128);
    }

    /// Words consumed by one Gaussian vector of length `d`.
    pub const fn gaussian_stride(d: usize) -> u64 {
        (d + d % 2) as u64
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.core.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// Iterator over exactly `d` standard normal draws.
    pub fn gaussians(&mut self, d: usize) -> Gaussians<'_> {
        Gaussians { rng: self, remaining: d, spare: None }
    }

    pub fn fill_gaussian<T: Scalar>(&mut self, out: &mut [T]) {
        let d = out.len();
        for (o, g) in out.iter_mut().zip(self.gaussians(d)) {
            *o = T::of(g);
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.normal_pair().0
    }
}

pub struct Gaussians<'a> {
    rng: &'a mut RngStream,
    remaining: usize,
    spare: Option<f64>,
}

impl Iterator for Gaussians<'_> {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if let Some(v) = self.spare.take() {
            return Some(v);
        }
        let (a, b) = self.rng.normal_pair();
        self.spare = Some(b);
        Some(a)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Gaussians<'_> {}
