use std::path::Path;

use conmezo::Method;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Cell, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::{lossless_float, trajectory_path, write_json, write_trajectory};
use crate::run::{run_single, RunOutput, RunSummary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub id: String,
    pub cell: Cell,
    pub seeds: Vec<u64>,
    #[serde(with = "lossless_float::vec")]
    pub final_objectives: Vec<f64>,
    /// Mean over seeds; +∞ if any seed diverged.
    #[serde(with = "lossless_float")]
    pub mean_final: f64,
    /// Sample standard deviation over seeds; 0 for a single seed.
    #[serde(with = "lossless_float")]
    pub std_final: f64,
    pub diverged_seeds: Vec<u64>,
    pub selected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub config: ExperimentConfig,
    pub method: Method,
    pub cells: Vec<CellReport>,
    /// Index into `cells` of the selected cell.
    pub selected: usize,
}

impl GridReport {
    pub fn best(&self) -> &CellReport {
        &self.cells[self.selected]
    }
}

/// Every run of a grid, with the report built from their summaries.
#[derive(Clone, Debug)]
pub struct GridRun {
    pub report: GridReport,
    /// `runs[i][k]` is cell `i`, seed `config.seeds[k]`.
    pub runs: Vec<Vec<RunOutput>>,
}

impl GridRun {
    /// Writes every trajectory, the resolved config and the report.
    pub fn save(&self, experiment_dir: &Path) -> Result<()> {
        let cfg = &self.report.config;
        for (cell, runs) in self.report.cells.iter().zip(&self.runs) {
            for run in runs {
                write_trajectory(&trajectory_path(experiment_dir, &cell.id, run.summary.seed), &run.trajectory)?;
            }
        }
        write_json(&experiment_dir.join("config.json"), cfg)?;
        write_json(&experiment_dir.join("summary.json"), &self.report)
    }
}

/// Index of the cell with the smallest mean final objective. Ties go to the
/// smaller η, then the smaller θ, then the larger β. `None` if every cell
/// diverged.
pub fn select_best(cells: &[CellReport]) -> Option<usize> {
    let key = |c: &CellReport| (c.mean_final, c.cell.eta, c.cell.theta, -c.cell.beta);
    let cmp = |a: &CellReport, b: &CellReport| {
        let (a, b) = (key(a), key(b));
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
    };
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.mean_final.is_finite())
        .min_by(|(_, a), (_, b)| cmp(a, b))
        .map(|(i, _)| i)
}

/// Builds a cell's report from its per-seed summaries.
pub fn cell_report(method: Method, cell: Cell, summaries: &[RunSummary]) -> CellReport {
    let finals: Vec<f64> = summaries.iter().map(|s| s.final_objective).collect();
    let diverged_seeds: Vec<u64> = summaries.iter().filter(|s| s.diverged).map(|s| s.seed).collect();
    let n = finals.len() as f64;
    let (mean_final, std_final) = if diverged_seeds.is_empty() {
        let mean = finals.iter().sum::<f64>() / n;
        let var = if finals.len() > 1 {
            finals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, var.sqrt())
    } else {
        (f64::INFINITY, f64::NAN)
    };
    CellReport {
        id: cell.id(method),
        cell,
        seeds: summaries.iter().map(|s| s.seed).collect(),
        final_objectives: finals,
        mean_final,
        std_final,
        diverged_seeds,
        selected: false,
    }
}

/// Runs every cell of `cfg` over every seed on a pool of `workers` threads
/// and selects the best cell.
pub fn run_grid(cfg: &ExperimentConfig, workers: usize) -> Result<GridRun> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, u64)> =
        (0..cells.len()).flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s))).collect();
    let outputs: Vec<Result<RunOutput>> =
        in_pool(workers, || jobs.par_iter().map(|&(i, seed)| run_single(cfg, &cells[i], seed)).collect())?;

    let mut runs: Vec<Vec<RunOutput>> = cells.iter().map(|_| Vec::with_capacity(cfg.seeds.len())).collect();
    for (&(i, _), out) in jobs.iter().zip(outputs) {
        runs[i].push(out?);
    }
    let mut reports: Vec<CellReport> = cells
        .iter()
        .zip(&runs)
        .map(|(&cell, rs)| {
            let summaries: Vec<RunSummary> = rs.iter().map(|r| r.summary.clone()).collect();
            cell_report(cfg.optimizer, cell, &summaries)
        })
        .collect();
    let selected = select_best(&reports).ok_or(HarnessError::AllDiverged)?;
    reports[selected].selected = true;
    Ok(GridRun {
        report: GridReport { config: cfg.clone(), method: cfg.optimizer, cells: reports, selected },
        runs,
    })
}

/// Runs one cell over every seed of `cfg` on `workers` threads, in seed order.
pub fn run_seeds(cfg: &ExperimentConfig, cell: &Cell, workers: usize) -> Result<Vec<RunOutput>> {
    in_pool(workers, || cfg.seeds.par_iter().map(|&seed| run_single(cfg, cell, seed)).collect())?
}

/// Runs `f` on a dedicated pool of `workers` threads (at least one).
pub fn in_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(eta: f64, beta: f64, theta: f64, mean_final: f64) -> CellReport {
        CellReport {
            id: String::new(),
            cell: Cell { theta, beta, eta },
            seeds: vec![0],
            final_objectives: vec![mean_final],
            mean_final,
            std_final: 0.0,
            diverged_seeds: vec![],
            selected: false,
        }
    }

    #[test]
    fn ties_prefer_smaller_eta_then_smaller_theta_then_larger_beta() {
        let cells = [
            report(1e-2, 0.9, 1.2, 1.0),
            report(1e-3, 0.9, 1.4, 1.0),
            report(1e-3, 0.9, 1.3, 1.0),
            report(1e-3, 0.95, 1.3, 1.0),
            report(1e-4, 0.99, 1.2, 2.0),
        ];
        assert_eq!(select_best(&cells), Some(3));
    }

    #[test]
    fn diverged_cells_are_never_selected() {
        let cells = [report(1.0, 0.9, 1.2, f64::INFINITY), report(1e-1, 0.9, 1.2, 5.0)];
        assert_eq!(select_best(&cells), Some(1));
        assert_eq!(select_best(&cells[..1]), None);
    }

    #[test]
    fn divergence_poisons_the_cell_mean() {
        let s = |seed, f: f64, diverged| RunSummary {
            seed,
            steps: 1,
            final_objective: f,
            best_objective: f,
            steps_to_target: None,
            evals: 2,
            total_wall_ns: 0,
            diverged,
        };
        let cell = Cell { theta: 1.0, beta: 0.9, eta: 0.1 };
        let ok = cell_report(Method::Conmezo, cell, &[s(0, 1.0, false), s(1, 3.0, false)]);
        assert_eq!(ok.mean_final, 2.0);
        assert!((ok.std_final - 2f64.sqrt()).abs() < 1e-15);
        let bad = cell_report(Method::Conmezo, cell, &[s(0, 1.0, false), s(1, f64::INFINITY, true)]);
        assert_eq!(bad.mean_final, f64::INFINITY);
        assert_eq!(bad.diverged_seeds, vec![1]);
    }
}
