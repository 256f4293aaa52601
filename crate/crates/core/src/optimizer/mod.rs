//! MeZO, ConMeZO and MeZO+Momentum.
//!
//! Every step costs exactly two objective evaluations. The three methods share
//! the same per-coordinate arithmetic so that reductions between them hold
//! bitwise under a shared seed:
//!
//! ```text
//! u      ~ dist                          (one direction draw per step)
//! z_i    = √d·u_i                        MeZO, MeZO+Momentum
//! z_i    = √d·(cos θ·m_i/‖m‖ + sin θ·u_i) ConMeZO
//! p_i    = λ·z_i;  x_i += p_i;  f₊;  x_i += −2·p_i;  f₋;  x_i += p_i
//! g      = (f₊ − f₋)/(2λ);  gz_i = g·z_i
//! MeZO:           x_i −= η·gz_i
//! ConMeZO:        x_i −= η·gz_i;  m_i = β_t·m_i + (1−β_t)·gz_i
//! MeZO+Momentum:  m_i = β_t·m_i + (1−β_t)·gz_i;  x_i −= η·m_i
//! ```
//!
//! At `t = 0` the momentum is initialized with the step's own draw, `m₀ = u₀`.
//!
//! ## Memory strategies
//!
//! [`MemoryStrategy::Buffered`] materializes `z` once in a scratch buffer.
//! [`MemoryStrategy::SeedReplay`] keeps no scratch buffer: it records the
//! stream counter of the step's draw and regenerates `u` for every pass.
//! MeZO regenerates four times per step (three perturbation passes and the
//! update). ConMeZO writes `z` into the momentum buffer, runs all passes from
//! there, and regenerates `u` once more to recover the old momentum while
//! applying the momentum update: two regenerations. When `cos θ` is too small
//! for that recovery to be stable (θ at or next to π/2) it falls back to
//! regenerating per pass. With `dist = UnitSphere`, seed replay needs one
//! extra pass over the stream to find the draw's norm.
//!
//! Both strategies apply identical floating-point operations to `x`; the only
//! difference is ConMeZO's recovered momentum, which can differ from the
//! buffered momentum by rounding.

mod conmezo;
mod mezo;
mod momentum;
mod schedule;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, StepError};
use crate::estimator::Objective;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::vector::Vector;

pub use crate::sampling::Direction;
pub use conmezo::ConMezo;
pub use mezo::Mezo;
pub use momentum::MezoMomentum;
pub use schedule::{theta_star, warmup_beta, warmup_breakpoints};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warmup {
    #[default]
    None,
    /// Flat 0.1, eased ramp to `beta_final` over `[T/100, T/10]`, then flat.
    Staged,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryStrategy {
    #[default]
    SeedReplay,
    Buffered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mezo,
    Conmezo,
    MezoMomentum,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Mezo, Method::Conmezo, Method::MezoMomentum];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mezo => "mezo",
            Method::Conmezo => "conmezo",
            Method::MezoMomentum => "mezo_momentum",
        }
    }

    pub fn uses_momentum(self) -> bool {
        !matches!(self, Method::Mezo)
    }

    pub fn uses_theta(self) -> bool {
        matches!(self, Method::Conmezo)
    }

    pub fn build<T: Scalar>(
        self,
        x0: Vector<T>,
        cfg: ConeConfig<T>,
        seed: u64,
    ) -> Result<Box<dyn ZerothOrderOptimizer<T> + Send>, ConfigError> {
        Ok(match self {
            Method::Mezo => Box::new(Mezo::new(x0, cfg, seed)?),
            Method::Conmezo => Box::new(ConMezo::new(x0, cfg, seed)?),
            Method::MezoMomentum => Box::new(MezoMomentum::new(x0, cfg, seed)?),
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mezo" => Ok(Method::Mezo),
            "conmezo" => Ok(Method::Conmezo),
            "mezo_momentum" | "mezo-momentum" => Ok(Method::MezoMomentum),
            other => Err(format!("unknown optimizer '{other}' (expected mezo, conmezo, mezo_momentum)")),
        }
    }
}

/// All tunables of a run. Methods ignore the fields they do not use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ConeConfig<T> {
    /// Cone half-angle in [0, π/2].
    pub theta: T,
    /// Momentum parameter in [0, 1] (the plateau value when warm-up is on).
    pub beta: T,
    pub eta: T,
    pub lambda: T,
    pub total_steps: u64,
    pub dist: Direction,
    pub warmup: Warmup,
    pub memory: MemoryStrategy,
}

impl<T: Scalar> Default for ConeConfig<T> {
    fn default() -> Self {
        Self {
            theta: T::of(1.35),
            beta: T::of(0.99),
            eta: T::of(1e-3),
            lambda: T::of(1e-3),
            total_steps: 10_000,
            dist: Direction::UnitSphere,
            warmup: Warmup::None,
            memory: MemoryStrategy::SeedReplay,
        }
    }
}

impl<T: Scalar> ConeConfig<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let f = |v: T| v.to_f64_lossy();
        if !(self.theta >= T::zero() && self.theta <= T::FRAC_PI_2()) {
            return Err(ConfigError::Theta(f(self.theta)));
        }
        if !(self.beta >= T::zero() && self.beta <= T::one()) {
            return Err(ConfigError::Beta(f(self.beta)));
        }
        for (name, v) in [("eta", self.eta), ("lambda", self.lambda)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(ConfigError::NotPositive { name, value: f(v) });
            }
        }
        if self.total_steps == 0 {
            return Err(ConfigError::NoSteps);
        }
        if self.warmup == Warmup::Staged && self.beta < T::of(0.1) {
            return Err(ConfigError::WarmupBeta(f(self.beta)));
        }
        Ok(())
    }

    /// Momentum parameter in effect at step `t`.
    pub fn beta_at(&self, t: u64) -> T {
        match self.warmup {
            Warmup::None => self.beta,
            Warmup::Staged => warmup_beta(t, self.total_steps, self.beta),
        }
    }
}

/// Mutable optimizer state.
#[derive(Clone, Debug)]
pub struct OptimizerState<T> {
    pub x: Vector<T>,
    /// Momentum; `None` until the first step initializes it.
    pub m: Option<Vector<T>>,
    /// Number of completed steps.
    pub t: u64,
    pub rng: RngStream,
    scratch: Option<Vector<T>>,
}

impl<T: Scalar> OptimizerState<T> {
    pub fn new(x0: Vector<T>, seed: u64) -> Self {
        assert!(!x0.is_empty(), "iterate must have dimension >= 1");
        Self { x: x0, m: None, t: 0, rng: RngStream::new(seed), scratch: None }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Bytes held in d-length buffers (iterate, momentum, scratch).
    pub fn buffer_bytes(&self) -> usize {
        let per = self.x.len() * std::mem::size_of::<T>();
        per * (1 + self.m.is_some() as usize + self.scratch.is_some() as usize)
    }

    fn scratch(&mut self) -> &mut Vector<T> {
        let d = self.x.len();
        self.scratch.get_or_insert_with(|| Vector::zeros(d))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<T> {
    /// Index of the step that produced this report (0-based).
    pub step: u64,
    /// `(f(x+λz) − f(x−λz)) / (2λ)`
    pub coefficient: T,
    pub f_plus: T,
    pub f_minus: T,
    pub z_norm: T,
    /// Momentum parameter used; zero for MeZO.
    pub beta_t: T,
    /// Passes over the random stream this step.
    pub regenerations: u32,
}

pub trait ZerothOrderOptimizer<T: Scalar> {
    fn method(&self) -> Method;
    fn config(&self) -> &ConeConfig<T>;
    fn state(&self) -> &OptimizerState<T>;
    fn step(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError>;

    fn x(&self) -> &[T] {
        &self.state().x
    }

    fn momentum(&self) -> Option<&[T]> {
        self.state().m.as_deref()
    }
}

/// Location and scale of a step's direction draw inside the stream.
#[derive(Clone, Copy, Debug)]
struct Draw<T> {
    start: u64,
    scale: T,
    end: u64,
}

impl<T: Scalar> Draw<T> {
    fn plan(rng: &mut RngStream, dist: Direction, d: usize) -> (Self, u32) {
        let (start, scale) = crate::sampling::plan_u(rng, dist, d);
        let end = start + RngStream::gaussian_stride(d);
        let passes = u32::from(dist == Direction::UnitSphere);
        (Self { start, scale, end }, passes)
    }

    /// Rewinds and yields `u_i` for i = 0..d.
    fn replay<'a>(&self, rng: &'a mut RngStream, d: usize) -> impl Iterator<Item = T> + 'a {
        rng.seek(self.start);
        let scale = self.scale;
        rng.gaussians(d).map(move |g| T::of(g) * scale)
    }
}

fn check_finite<T: Scalar>(state: &OptimizerState<T>, step: u64) -> Result<(), StepError> {
    let ok = state.x.is_finite() && state.m.as_ref().is_none_or(|m| m.is_finite());
    if ok {
        Ok(())
    } else {
        Err(StepError::NonFiniteEstimate { step })
    }
}

fn check_dim<T: Scalar>(state: &OptimizerState<T>, f: &dyn Objective<T>) {
    assert_eq!(state.dim(), f.dim(), "objective and iterate dimensions differ");
}
