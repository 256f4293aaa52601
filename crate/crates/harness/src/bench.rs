use std::time::Instant;

use conmezo::analysis::stats::median;
use conmezo::problems::Constant;
use conmezo::{ConeConfig, Direction, MemoryStrategy, Method, Vector};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Below this dimension per-step overhead dominates the vector work.
pub const MIN_BENCH_DIM: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub method: Method,
    pub d: usize,
    pub memory: MemoryStrategy,
    pub dist: Direction,
    pub theta: f64,
    /// Timed steps.
    pub n_steps: usize,
    /// Untimed steps run first.
    pub warmup_steps: usize,
    pub seed: u64,
}

impl BenchSpec {
    pub fn new(method: Method, d: usize, memory: MemoryStrategy) -> Self {
        Self {
            method,
            d,
            memory,
            dist: Direction::UnitSphere,
            theta: ConeConfig::<f64>::default().theta,
            n_steps: 200,
            warmup_steps: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub spec: BenchSpec,
    pub median_ns: f64,
    pub mean_ns: f64,
    pub min_ns: u64,
    /// Direction regenerations per step, from the optimizer's report.
    pub regenerations: u32,
    pub samples_ns: Vec<u64>,
}

/// Median wall time of one optimizer step on a constant objective, on the
/// calling thread.
pub fn bench_step_time(spec: &BenchSpec) -> Result<BenchResult> {
    if spec.d < MIN_BENCH_DIM {
        return Err(HarnessError::BenchTooSmall { d: spec.d, min: MIN_BENCH_DIM });
    }
    if spec.n_steps == 0 {
        return Err(HarnessError::Config("bench needs at least one timed step".into()));
    }
    let f = Constant::new(spec.d, 1.0);
    let cfg = ConeConfig {
        theta: spec.theta,
        memory: spec.memory,
        dist: spec.dist,
        total_steps: (spec.n_steps + spec.warmup_steps) as u64,
        ..ConeConfig::default()
    };
    let mut opt = spec.method.build(Vector::zeros(spec.d), cfg, spec.seed)?;
    let mut regenerations = 0;
    for _ in 0..spec.warmup_steps {
        regenerations = opt.step(&f)?.regenerations;
    }
    let mut samples_ns = Vec::with_capacity(spec.n_steps);
    for _ in 0..spec.n_steps {
        let started = Instant::now();
        let report = opt.step(&f)?;
        samples_ns.push(started.elapsed().as_nanos() as u64);
        regenerations = report.regenerations;
    }
    let as_f64: Vec<f64> = samples_ns.iter().map(|&t| t as f64).collect();
    Ok(BenchResult {
        spec: *spec,
        median_ns: median(&as_f64),
        mean_ns: as_f64.iter().sum::<f64>() / as_f64.len() as f64,
        min_ns: samples_ns.iter().copied().min().expect("at least one timed step"),
        regenerations,
        samples_ns,
    })
}
