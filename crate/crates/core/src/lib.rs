//! Zeroth-order optimization with cone-restricted search directions.
//!
//! The crate provides:
//!
//! - dense vector kernels with a fixed summation order ([`vector`]),
//! - a counter-addressable random stream that can replay any draw ([`rng`]),
//! - the fast and exact cone samplers ([`sampling`]),
//! - the two-point gradient estimator and its λ→0 limit ([`estimator`]),
//! - MeZO, ConMeZO and MeZO+Momentum with seed-replay or buffered
//!   perturbations ([`optimizer`]),
//! - analytic test problems ([`problems`]),
//! - Monte-Carlo checks of the estimator moments, the cone-angle
//!   concentration and the descent inequality ([`analysis`]).
//!
//! Everything up to and including the optimizers is generic over the
//! floating-point type through [`Scalar`]; the analysis routines work in
//! `f64`. The aliases below name the concrete `f64` instantiations used by the
//! harness.

pub mod analysis;
pub mod error;
pub mod estimator;
pub mod optimizer;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod vector;

pub use error::{ConfigError, StepError};
pub use estimator::{zoge, zoge_coefficient, zoge_limit, Counted, Objective};
pub use optimizer::{
    theta_star, warmup_beta, ConMezo, ConeConfig, Direction, MemoryStrategy, Mezo, MezoMomentum,
    Method, OptimizerState, StepReport, Warmup, ZerothOrderOptimizer,
};
pub use rng::RngStream;
pub use sampling::{ConeDirectionSpec, ExactConeSampler};
pub use scalar::Scalar;
pub use vector::Vector;

/// The parameter iterate and every direction vector, in double precision.
pub type DenseVector = Vector<f64>;
pub type DenseVector32 = Vector<f32>;

pub type Quadratic = problems::Quadratic<f64>;
pub type ConeConfig64 = ConeConfig<f64>;
pub type ConMezo64 = ConMezo<f64>;
pub type Mezo64 = Mezo<f64>;
pub type MezoMomentum64 = MezoMomentum<f64>;
pub type StepReport64 = StepReport<f64>;
