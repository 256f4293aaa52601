//! Flat JSON experiment configuration.
//!
//! Every key is optional in a file; missing keys take the defaults listed in
//! [`KEYS`]. `theta`, `beta` and `eta` accept either a number or an array of
//! numbers; arrays span a grid. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use conmezo::{ConeConfig, Direction, MemoryStrategy, Method, Warmup};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{HarnessError, Result};
use crate::problem::ProblemSpec;

/// Threshold on `max(f₊, f₋) / f(x₀)` above which a run counts as diverged.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// `(key, default, description)` for every configuration key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("name", "\"experiment\"", "experiment name; output subdirectory"),
    ("problem", "\"quadratic:d=1000,x0_norm=10\"", "quadratic:d=N[,x0_norm=R] | sphere:d=N[,x0_norm=R] | rosenbrock:d=N | constant:d=N"),
    ("optimizer", "\"conmezo\"", "mezo | conmezo | mezo_momentum"),
    ("theta", "1.35", "cone half-angle in [0, pi/2] (number or array)"),
    ("beta", "0.99", "momentum in [0, 1]; plateau value under warm-up (number or array)"),
    ("eta", "0.001", "learning rate > 0 (number or array)"),
    ("lambda", "0.001", "smoothing > 0"),
    ("steps", "10000", "optimizer steps per run"),
    ("dist", "\"unit_sphere\"", "unit_sphere | gaussian"),
    ("warmup", "\"none\"", "none | staged"),
    ("memory", "\"seed_replay\"", "seed_replay | buffered"),
    ("seeds", "[0]", "run seeds (non-empty, distinct)"),
    ("init_seed", "null", "fixed seed for the starting point; null uses the run seed"),
    ("log_every", "100", "trajectory logging interval in steps"),
    ("target", "null", "objective level for steps_to_target"),
    ("output_dir", "\"results\"", "root directory for outputs"),
];

/// A number or a list of numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::One(v) => vec![*v],
            Self::Many(v) => v.clone(),
        }
    }
}

impl From<f64> for OneOrMany {
    fn from(v: f64) -> Self {
        Self::One(v)
    }
}

impl From<Vec<f64>> for OneOrMany {
    fn from(v: Vec<f64>) -> Self {
        Self::Many(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub optimizer: Method,
    pub theta: OneOrMany,
    pub beta: OneOrMany,
    pub eta: OneOrMany,
    pub lambda: f64,
    pub steps: u64,
    pub dist: Direction,
    pub warmup: Warmup,
    pub memory: MemoryStrategy,
    pub seeds: Vec<u64>,
    pub init_seed: Option<u64>,
    pub log_every: u64,
    pub target: Option<f64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let cone = ConeConfig::<f64>::default();
        Self {
            name: "experiment".into(),
            problem: ProblemSpec::Quadratic { d: 1000, x0_norm: 10.0 },
            optimizer: Method::Conmezo,
            theta: cone.theta.into(),
            beta: cone.beta.into(),
            eta: cone.eta.into(),
            lambda: cone.lambda,
            steps: cone.total_steps,
            dist: cone.dist,
            warmup: cone.warmup,
            memory: cone.memory,
            seeds: vec![0],
            init_seed: None,
            log_every: 100,
            target: None,
            output_dir: PathBuf::from("results"),
        }
    }
}

/// One point of the hyperparameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub theta: f64,
    pub beta: f64,
    pub eta: f64,
}

impl Cell {
    /// Directory-safe identifier naming only the parameters `method` uses.
    pub fn id(&self, method: Method) -> String {
        let mut parts = vec![format!("eta={}", self.eta)];
        if method.uses_momentum() {
            parts.push(format!("beta={}", self.beta));
        }
        if method.uses_theta() {
            parts.push(format!("theta={}", self.theta));
        }
        parts.join("_")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_json(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    /// Overlays the keys present in a JSON document onto `self`. Syntax
    /// errors, unknown keys and bad values are reported with line and column.
    pub fn apply_json(&mut self, text: &str) -> Result<()> {
        let located = |e: serde_json::Error| HarnessError::Config(format!("line {} column {}: {e}", e.line(), e.column()));
        serde_json::from_str::<ExperimentConfig>(text).map_err(located)?;
        let Value::Object(overlay) = serde_json::from_str::<Value>(text).map_err(located)? else {
            return Err(HarnessError::Config("configuration must be a JSON object".into()));
        };
        let mut map = self.to_map();
        map.extend(overlay);
        *self = from_map(map)?;
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        self.apply_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("config serializes") {
            Value::Object(map) => map,
            _ => unreachable!("config serializes to an object"),
        }
    }

    /// Applies `key=value[,key=value…]` overrides. Values are parsed as JSON
    /// when possible (numbers, arrays, null) and as strings otherwise.
    /// Commas inside brackets do not split.
    pub fn apply_overrides(&mut self, overrides: &str) -> Result<()> {
        let mut map = self.to_map();
        for item in split_top_level(overrides) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override '{item}' is not key=value")))?;
            let key = key.trim();
            if !KEYS.iter().any(|(k, _, _)| *k == key) {
                return Err(HarnessError::Config(format!("unknown key '{key}' in override")));
            }
            map.insert(key.to_string(), parse_value(raw.trim()));
        }
        *self = from_map(map)?;
        Ok(())
    }

    /// Checks every invariant and every grid cell's optimizer settings.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("seeds must not be empty".into()));
        }
        let distinct: BTreeSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(HarnessError::Config("seeds must be distinct".into()));
        }
        if self.log_every == 0 {
            return Err(HarnessError::Config("log_every must be at least 1".into()));
        }
        for (key, v) in [("theta", &self.theta), ("beta", &self.beta), ("eta", &self.eta)] {
            if v.values().is_empty() {
                return Err(HarnessError::Config(format!("{key} must list at least one value")));
            }
        }
        for cell in self.cells() {
            self.cone_config(&cell).validate()?;
        }
        Ok(())
    }

    /// Grid cells relevant to the optimizer. Parameters the method ignores
    /// are fixed at their first listed value, so MeZO spans only `eta`.
    pub fn cells(&self) -> Vec<Cell> {
        let thetas = if self.optimizer.uses_theta() { self.theta.values() } else { first(&self.theta) };
        let betas = if self.optimizer.uses_momentum() { self.beta.values() } else { first(&self.beta) };
        let mut out = Vec::new();
        for &eta in &self.eta.values() {
            for &beta in &betas {
                for &theta in &thetas {
                    out.push(Cell { theta, beta, eta });
                }
            }
        }
        out
    }

    pub fn cone_config(&self, cell: &Cell) -> ConeConfig<f64> {
        ConeConfig {
            theta: cell.theta,
            beta: cell.beta,
            eta: cell.eta,
            lambda: self.lambda,
            total_steps: self.steps,
            dist: self.dist,
            warmup: self.warmup,
            memory: self.memory,
        }
    }

    /// Directory holding this experiment's outputs.
    pub fn experiment_dir(&self) -> PathBuf {
        self.output_dir.join(&self.name)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn first(v: &OneOrMany) -> Vec<f64> {
    v.values().into_iter().take(1).collect()
}

fn from_map(map: Map<String, Value>) -> Result<ExperimentConfig> {
    serde_json::from_value(Value::Object(map)).map_err(|e| HarnessError::Config(e.to_string()))
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Help text listing every key with its default.
pub fn keys_help() -> String {
    let width = KEYS.iter().map(|(k, _, _)| k.len()).max().unwrap_or(0);
    let dwidth = KEYS.iter().map(|(_, d, _)| d.len()).max().unwrap_or(0);
    let mut out = String::from("Configuration keys (default in the middle column):\n");
    for (k, d, doc) in KEYS {
        out.push_str(&format!("  {k:<width$}  {d:<dwidth$}  {doc}\n"));
    }
    out
}
