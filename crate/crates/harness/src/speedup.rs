use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::output::lossless_float;
use crate::run::TrajectoryRow;

/// `(step, objective)` pairs with strictly increasing steps.
pub type Curve = Vec<(u64, f64)>;

pub fn curve(rows: &[TrajectoryRow]) -> Curve {
    rows.iter().map(|r| (r.step, r.objective)).collect()
}

/// Pointwise arithmetic mean of per-seed curves logged at the same steps.
pub fn mean_curve(curves: &[Curve]) -> Result<Curve> {
    let first = curves
        .first()
        .filter(|c| !c.is_empty())
        .ok_or_else(|| HarnessError::Config("no curves to average".into()))?;
    for c in curves {
        if c.len() != first.len() || c.iter().zip(first).any(|(a, b)| a.0 != b.0) {
            return Err(HarnessError::Config("curves are logged at different steps".into()));
        }
    }
    let n = curves.len() as f64;
    Ok((0..first.len())
        .map(|i| (first[i].0, curves.iter().map(|c| c[i].1).sum::<f64>() / n))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupResult {
    /// `horizon / crossing_step`; `None` when the target is never reached.
    pub ratio: Option<f64>,
    /// First logged step (after step 0) at which the cone curve is ≤ `target`.
    pub crossing_step: Option<u64>,
    /// Last step of the baseline curve.
    pub horizon: u64,
    /// Baseline objective at `horizon`.
    #[serde(with = "lossless_float")]
    pub target: f64,
    /// Ratios computed seed by seed, pairing curves by position.
    pub per_seed: Vec<Option<f64>>,
}

/// `T_base / T_cone`, where `T_cone` is the first step at which `cone` reaches
/// the final value of `base`. Returns `(ratio, crossing_step)`.
pub fn speedup_ratio(cone: &[(u64, f64)], base: &[(u64, f64)]) -> (Option<f64>, Option<u64>) {
    let Some(&(horizon, target)) = base.last() else {
        return (None, None);
    };
    let crossing = cone.iter().find(|&&(step, v)| step > 0 && v <= target).map(|&(step, _)| step);
    (crossing.map(|t| horizon as f64 / t as f64), crossing)
}

/// Speedup of the seed-averaged cone curve over the seed-averaged baseline,
/// plus the per-seed ratios.
pub fn speedup(cone_runs: &[Curve], base_runs: &[Curve]) -> Result<SpeedupResult> {
    let cone = mean_curve(cone_runs)?;
    let base = mean_curve(base_runs)?;
    let (ratio, crossing_step) = speedup_ratio(&cone, &base);
    let &(horizon, target) = base.last().expect("mean_curve rejects empty curves");
    let per_seed = cone_runs.iter().zip(base_runs).map(|(c, b)| speedup_ratio(c, b).0).collect();
    Ok(SpeedupResult { ratio, crossing_step, horizon, target, per_seed })
}
