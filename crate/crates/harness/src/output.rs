//! On-disk layout:
//!
//! ```text
//! <output_dir>/<name>/config.json          resolved configuration
//! <output_dir>/<name>/summary.json         run or grid report
//! <output_dir>/<name>/<cell-id>/seed-<s>.csv
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::run::TrajectoryRow;

pub const CSV_HEADER: [&str; 7] = ["step", "objective", "grad_norm", "cos2_rho", "beta_t", "theta", "wall_ns"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn trajectory_path(experiment_dir: &Path, cell_id: &str, seed: u64) -> PathBuf {
    experiment_dir.join(cell_id).join(format!("seed-{seed}.csv"))
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| HarnessError::Io { path: parent.into(), source })?;
    }
    Ok(())
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            format_float(r.objective),
            format_opt(r.grad_norm),
            format_opt(r.cos2_rho),
            format_float(r.beta_t),
            format_float(r.theta),
            r.wall_ns.to_string(),
        ])?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let bad = |what: &str| HarnessError::Config(format!("{}: malformed {what}", path.display()));
    let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
    let opt = |s: &str, what: &str| if s.is_empty() { Ok(None) } else { float(s, what).map(Some) };
    let mut rows = Vec::new();
    for record in r.records() {
        let rec = record?;
        if rec.len() != CSV_HEADER.len() {
            return Err(bad("row"));
        }
        rows.push(TrajectoryRow {
            step: rec[0].parse().map_err(|_| bad("step"))?,
            objective: float(&rec[1], "objective")?,
            grad_norm: opt(&rec[2], "grad_norm")?,
            cos2_rho: opt(&rec[3], "cos2_rho")?,
            beta_t: float(&rec[4], "beta_t")?,
            theta: float(&rec[5], "theta")?,
            wall_ns: rec[6].parse().map_err(|_| bad("wall_ns"))?,
        });
    }
    Ok(rows)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    create_parent(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|source| HarnessError::Json { path: path.into(), source })?;
    fs::write(path, text + "\n").map_err(|source| HarnessError::Io { path: path.into(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    fs::write(path, text).map_err(|source| HarnessError::Io { path: path.into(), source })
}

/// Serde adapter writing non-finite floats as the strings `inf`, `-inf`, `NaN`,
/// which plain JSON numbers cannot hold.
pub mod lossless_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else {
            Repr::Text(v.to_string())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => s.parse().map_err(|_| E::custom(format!("not a float: '{s}'"))),
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| to_repr(x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}
