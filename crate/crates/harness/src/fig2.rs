//! Frozen preset for the synthetic-quadratic speedup experiment: tune each
//! method on a grid at a short horizon, rerun the selected cells at the long
//! horizon, and compare seed-averaged curves.

use std::fmt::Write as _;
use std::path::Path;

use conmezo::{Direction, MemoryStrategy, Method, Warmup};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::grid::{run_grid, GridReport, GridRun};
use crate::output::{lossless_float, write_json, write_text};
use crate::problem::ProblemSpec;
use crate::speedup::{curve, mean_curve, speedup, Curve, SpeedupResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Config {
    pub d: usize,
    pub lambda: f64,
    pub x0_norm: f64,
    pub etas: Vec<f64>,
    pub betas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub tuning_steps: u64,
    pub final_steps: u64,
    pub tuning_log_every: u64,
    /// Logging interval of the long runs; also the resolution of the crossing step.
    pub final_log_every: u64,
    /// Both strategies give the same iterates to rounding; buffered is faster at this size.
    pub memory: MemoryStrategy,
    /// Also tune and run MeZO+Momentum over `etas × betas`.
    pub include_momentum: bool,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            d: 1000,
            lambda: 0.01,
            x0_norm: 10.0,
            etas: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4],
            betas: vec![0.8, 0.9, 0.95, 0.99],
            thetas: vec![1.2, 1.3, 1.4, 1.5],
            seeds: (0..5).collect(),
            tuning_steps: 10_000,
            final_steps: 100_000,
            tuning_log_every: 1_000,
            final_log_every: 10,
            memory: MemoryStrategy::Buffered,
            include_momentum: false,
        }
    }
}

impl Fig2Config {
    /// Experiment configuration for `method` at the tuning horizon.
    pub fn tuning_config(&self, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            name: format!("tune-{}", method.name()),
            problem: ProblemSpec::Quadratic { d: self.d, x0_norm: self.x0_norm },
            optimizer: method,
            theta: self.thetas.clone().into(),
            beta: self.betas.clone().into(),
            eta: self.etas.clone().into(),
            lambda: self.lambda,
            steps: self.tuning_steps,
            dist: Direction::UnitSphere,
            warmup: Warmup::None,
            memory: self.memory,
            seeds: self.seeds.clone(),
            init_seed: None,
            log_every: self.tuning_log_every,
            target: None,
            output_dir: Default::default(),
        }
    }

    /// The selected cell of a tuning grid rerun at the final horizon.
    pub fn final_config(&self, tuned: &GridReport) -> ExperimentConfig {
        let best = tuned.best().cell;
        ExperimentConfig {
            name: format!("final-{}", tuned.method.name()),
            theta: best.theta.into(),
            beta: best.beta.into(),
            eta: best.eta.into(),
            steps: self.final_steps,
            log_every: self.final_log_every,
            ..self.tuning_config(tuned.method)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub tuning: GridReport,
    /// Seed-mean objective at the final horizon.
    #[serde(with = "lossless_float")]
    pub final_mean: f64,
    #[serde(skip)]
    pub mean_curve: Curve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Report {
    pub config: Fig2Config,
    pub mezo: MethodOutcome,
    pub conmezo: MethodOutcome,
    pub momentum: Option<MethodOutcome>,
    pub speedup: SpeedupResult,
    /// The selected ConMeZO cell ends below the selected MeZO cell.
    pub ordering_holds: bool,
}

/// Runs the protocol with `workers` threads. With `out_dir`, writes the
/// tuning reports, every long-horizon trajectory, `fig2.dat` for gnuplot and
/// `summary.json`. `progress` receives one line per phase.
pub fn reproduce_fig2(
    cfg: &Fig2Config,
    workers: usize,
    out_dir: Option<&Path>,
    mut progress: impl FnMut(&str),
) -> Result<Fig2Report> {
    let mut methods = vec![Method::Mezo, Method::Conmezo];
    if cfg.include_momentum {
        methods.push(Method::MezoMomentum);
    }
    let mut outcomes = Vec::new();
    let mut final_runs = Vec::new();
    for method in methods {
        let tuning = run_grid(&cfg.tuning_config(method), workers)?;
        let best = tuning.report.best();
        progress(&format!(
            "tuned {method}: {} cells, best {} mean final {:.6e}",
            tuning.report.cells.len(),
            best.id,
            best.mean_final
        ));
        let long = run_grid(&cfg.final_config(&tuning.report), workers)?;
        let curves = seed_curves(&long);
        let mean = mean_curve(&curves)?;
        let final_mean = mean.last().expect("curves are non-empty").1;
        progress(&format!("final {method}: mean objective {final_mean:.6e} at step {}", cfg.final_steps));
        if let Some(dir) = out_dir {
            write_json(&dir.join(format!("tuning-{}.json", method.name())), &tuning.report)?;
            long.save(&dir.join(format!("final-{}", method.name())))?;
        }
        outcomes.push(MethodOutcome { method, tuning: tuning.report, final_mean, mean_curve: mean });
        final_runs.push(curves);
    }

    let speedup = speedup(&final_runs[1], &final_runs[0])?;
    let mut outcomes = outcomes.into_iter();
    let mezo = outcomes.next().expect("mezo outcome");
    let conmezo = outcomes.next().expect("conmezo outcome");
    let momentum = outcomes.next();
    let report = Fig2Report {
        config: cfg.clone(),
        ordering_holds: conmezo.final_mean < mezo.final_mean,
        mezo,
        conmezo,
        momentum,
        speedup,
    };
    if let Some(dir) = out_dir {
        write_text(&dir.join("fig2.dat"), &gnuplot_data(&report))?;
        write_json(&dir.join("summary.json"), &report)?;
    }
    Ok(report)
}

fn seed_curves(run: &GridRun) -> Vec<Curve> {
    run.runs[run.report.selected].iter().map(|r| curve(&r.trajectory)).collect()
}

/// Whitespace-separated seed-mean curves, one row per logged step.
pub fn gnuplot_data(report: &Fig2Report) -> String {
    let mut cols = vec![&report.mezo, &report.conmezo];
    cols.extend(report.momentum.as_ref());
    let mut out = String::from("# step");
    for c in &cols {
        let _ = write!(out, " {}", c.method.name());
    }
    out.push('\n');
    for (i, &(step, _)) in report.mezo.mean_curve.iter().enumerate() {
        let _ = write!(out, "{step}");
        for c in &cols {
            let _ = write!(out, " {:.16e}", c.mean_curve[i].1);
        }
        out.push('\n');
    }
    out
}
