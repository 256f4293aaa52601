//! Experiment orchestration for the cone zeroth-order optimizers: single
//! runs, hyperparameter grids with multi-seed aggregation, trajectory CSVs,
//! the speedup statistic, a per-step timing bench, and the frozen
//! synthetic-quadratic reproduction preset.
//!
//! Everything here works in `f64`.

pub mod bench;
pub mod config;
pub mod error;
pub mod fig2;
pub mod grid;
pub mod output;
pub mod problem;
pub mod run;
pub mod speedup;

pub use bench::{bench_step_time, BenchResult, BenchSpec, MIN_BENCH_DIM};
pub use config::{keys_help, Cell, ExperimentConfig, OneOrMany, KEYS};
pub use error::{HarnessError, Result};
pub use fig2::{reproduce_fig2, Fig2Config, Fig2Report};
pub use grid::{run_grid, run_seeds, select_best, CellReport, GridReport, GridRun};
pub use problem::{Problem, ProblemSpec};
pub use run::{run_single, RunOutput, RunSummary, TrajectoryRow};
pub use speedup::{mean_curve, speedup, speedup_ratio, Curve, SpeedupResult};
