use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use conmezo::analysis::track_alignment;
use conmezo::{Counted, Objective};
use serde::{Deserialize, Serialize};

use crate::config::{Cell, ExperimentConfig, DIVERGENCE_FACTOR};
use crate::error::Result;
use crate::output::lossless_float;

/// One logged point of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    /// Completed steps; 0 is the starting point.
    pub step: u64,
    pub objective: f64,
    /// `‖∇f(x)‖` when the problem has an analytic gradient.
    pub grad_norm: Option<f64>,
    /// Alignment of momentum and gradient; absent before the first step and for MeZO.
    pub cos2_rho: Option<f64>,
    /// Momentum parameter used by the last step; 0 for MeZO.
    pub beta_t: f64,
    /// Cone angle; π/2 for methods that sample the whole sphere.
    pub theta: f64,
    /// Cumulative time spent inside optimizer steps.
    pub wall_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub steps: u64,
    /// +∞ for a diverged run.
    #[serde(with = "lossless_float")]
    pub final_objective: f64,
    /// Smallest objective among the logged rows.
    #[serde(with = "lossless_float")]
    pub best_objective: f64,
    /// First step with objective ≤ target. Every step is checked, not only logged ones.
    pub steps_to_target: Option<u64>,
    /// Counted function evaluations; `2 × steps` unless a step aborted.
    pub evals: u64,
    pub total_wall_ns: u64,
    pub diverged: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trajectory: Vec<TrajectoryRow>,
    pub summary: RunSummary,
}

/// Runs one grid cell for one seed. Deterministic in `(cfg, cell, seed)` apart
/// from the `wall_ns` column.
///
/// The starting point is drawn from `cfg.init_seed`, or from `seed` when unset.
/// A run is flagged diverged and stopped when a step produces a non-finite
/// value or `max(f₊, f₋)` exceeds [`DIVERGENCE_FACTOR`]·max(|f(x₀)|, 1); the
/// trajectory up to that point is kept.
pub fn run_single(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> Result<RunOutput> {
    let cone = cfg.cone_config(cell);
    cone.validate()?;
    let problem = cfg.problem.build(cfg.init_seed.unwrap_or(seed));
    let counted = Counted::new(&problem);
    let method = cfg.optimizer;
    let mut opt = method.build(problem.x0().clone(), cone.clone(), seed)?;

    let theta = if method.uses_theta() { cell.theta } else { FRAC_PI_2 };
    let f0 = problem.value(problem.x0());
    let limit = DIVERGENCE_FACTOR * f0.abs().max(1.0);

    let row = |step: u64, beta_t: f64, wall_ns: u64, opt: &dyn conmezo::ZerothOrderOptimizer<f64>| {
        let x = opt.x();
        TrajectoryRow {
            step,
            objective: problem.value(x),
            grad_norm: problem.grad(x).map(|g| g.norm()),
            cos2_rho: track_alignment(opt.state(), &problem).map(|a| a.cos2_rho),
            beta_t,
            theta,
            wall_ns,
        }
    };

    let initial_beta = if method.uses_momentum() { cone.beta_at(0) } else { 0.0 };
    let mut trajectory = vec![row(0, initial_beta, 0, opt.as_ref())];
    let mut steps_to_target = cfg.target.filter(|&t| f0 <= t).map(|_| 0);
    let mut wall_ns = 0u64;
    let mut diverged = false;
    let mut steps = 0u64;
    let mut beta_t = initial_beta;

    while steps < cfg.steps {
        let started = Instant::now();
        let outcome = opt.step(&counted);
        wall_ns += started.elapsed().as_nanos() as u64;
        match outcome {
            Ok(report) => {
                steps += 1;
                beta_t = report.beta_t;
                let worst = report.f_plus.max(report.f_minus);
                if !worst.is_finite() || worst > limit {
                    diverged = true;
                }
            }
            // An aborted step is not counted; its evaluations are.
            Err(_) => diverged = true,
        }
        if let (Some(target), None) = (cfg.target, steps_to_target) {
            if problem.value(opt.x()) <= target {
                steps_to_target = Some(steps);
            }
        }
        let due = diverged || steps % cfg.log_every == 0 || steps == cfg.steps;
        if due && trajectory.last().is_some_and(|r| r.step < steps) {
            trajectory.push(row(steps, beta_t, wall_ns, opt.as_ref()));
        }
        if diverged {
            break;
        }
    }

    let final_objective = trajectory.last().expect("row 0 is always logged").objective;
    let best_objective = trajectory.iter().map(|r| r.objective).fold(f64::INFINITY, f64::min);
    let summary = RunSummary {
        seed,
        steps,
        final_objective: if diverged { f64::INFINITY } else { final_objective },
        best_objective,
        steps_to_target,
        evals: counted.evals(),
        total_wall_ns: wall_ns,
        diverged,
    };
    Ok(RunOutput { trajectory, summary })
}
