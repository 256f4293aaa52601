//! Problem selection by name: `quadratic:d=1000,x0_norm=10`, `sphere:d=10`,
//! `rosenbrock:d=2`, `constant:d=100000`.

use std::fmt;
use std::str::FromStr;

use conmezo::problems::{self, Constant, Quadratic, Rosenbrock, Sphere};
use conmezo::{Objective, Vector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    /// Geometric spectrum from 1/d to 1, `x₀` uniform on the sphere of radius `x0_norm`.
    Quadratic { d: usize, x0_norm: f64 },
    /// `‖x‖²` from a random start of norm `x0_norm`.
    Sphere { d: usize, x0_norm: f64 },
    /// Chained Rosenbrock from `(−1.2, 1, −1.2, 1, …)`.
    Rosenbrock { d: usize },
    /// Constant value from the origin; used for timing.
    Constant { d: usize },
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        match *self {
            Self::Quadratic { d, .. } | Self::Sphere { d, .. } | Self::Rosenbrock { d } | Self::Constant { d } => d,
        }
    }

    /// Instantiates the objective; random starts are drawn from `init_seed`.
    pub fn build(&self, init_seed: u64) -> Problem {
        match *self {
            Self::Quadratic { d, x0_norm } => Problem::Quadratic(problems::make_quadratic(d, x0_norm, init_seed)),
            Self::Sphere { d, x0_norm } => {
                Problem::Sphere(problems::make_sphere(d), problems::random_start(d, x0_norm, init_seed))
            }
            Self::Rosenbrock { d } => {
                let f = problems::make_rosenbrock(d);
                let x0 = f.standard_start();
                Problem::Rosenbrock(f, x0)
            }
            Self::Constant { d } => Problem::Constant(Constant::new(d, 1.0), Vector::zeros(d)),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Quadratic { d, x0_norm } => write!(f, "quadratic:d={d},x0_norm={x0_norm}"),
            Self::Sphere { d, x0_norm } => write!(f, "sphere:d={d},x0_norm={x0_norm}"),
            Self::Rosenbrock { d } => write!(f, "rosenbrock:d={d}"),
            Self::Constant { d } => write!(f, "constant:d={d}"),
        }
    }
}

impl FromStr for ProblemSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let err = |reason: String| HarnessError::Problem { spec: s.to_string(), reason };
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut d = None;
        let mut x0_norm = None;
        for kv in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("expected key=value, got '{kv}'")))?;
            match k.trim() {
                "d" => d = Some(v.trim().parse::<usize>().map_err(|e| err(format!("d: {e}")))?),
                "x0_norm" => {
                    let r = v.trim().parse::<f64>().map_err(|e| err(format!("x0_norm: {e}")))?;
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(err("x0_norm must be positive".into()));
                    }
                    x0_norm = Some(r);
                }
                other => return Err(err(format!("unknown parameter '{other}'"))),
            }
        }
        let d = d.ok_or_else(|| err("missing d".into()))?;
        let spec = match name.trim() {
            "quadratic" => Self::Quadratic { d, x0_norm: x0_norm.unwrap_or(10.0) },
            "sphere" => Self::Sphere { d, x0_norm: x0_norm.unwrap_or(1.0) },
            "rosenbrock" | "constant" if x0_norm.is_some() => {
                return Err(err("x0_norm is not a parameter of this problem".into()))
            }
            "rosenbrock" => Self::Rosenbrock { d },
            "constant" => Self::Constant { d },
            other => {
                return Err(err(format!("unknown problem '{other}' (expected quadratic, sphere, rosenbrock, constant)")))
            }
        };
        let min = if matches!(spec, Self::Constant { .. }) { 1 } else { 2 };
        if d < min {
            return Err(err(format!("d must be at least {min}")));
        }
        Ok(spec)
    }
}

impl Serialize for ProblemSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProblemSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An instantiated objective together with its starting point.
#[derive(Clone, Debug)]
pub enum Problem {
    Quadratic(Quadratic<f64>),
    Sphere(Sphere, Vector<f64>),
    Rosenbrock(Rosenbrock, Vector<f64>),
    Constant(Constant, Vector<f64>),
}

impl Problem {
    pub fn x0(&self) -> &Vector<f64> {
        match self {
            Self::Quadratic(q) => q.x0(),
            Self::Sphere(_, x0) | Self::Rosenbrock(_, x0) | Self::Constant(_, x0) => x0,
        }
    }

    fn objective(&self) -> &dyn Objective<f64> {
        match self {
            Self::Quadratic(q) => q,
            Self::Sphere(f, _) => f,
            Self::Rosenbrock(f, _) => f,
            Self::Constant(f, _) => f,
        }
    }
}

impl Objective<f64> for Problem {
    fn dim(&self) -> usize {
        self.objective().dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.objective().value(x)
    }

    fn grad(&self, x: &[f64]) -> Option<Vector<f64>> {
        self.objective().grad(x)
    }

    fn minimum(&self) -> Option<f64> {
        self.objective().minimum()
    }

    fn minimizer(&self) -> Option<Vector<f64>> {
        self.objective().minimizer()
    }

    fn smoothness(&self) -> Option<f64> {
        self.objective().smoothness()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["quadratic:d=1000,x0_norm=10", "sphere:d=10,x0_norm=1", "rosenbrock:d=2", "constant:d=5"] {
            let p: ProblemSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(
            "quadratic:d=1000".parse::<ProblemSpec>().unwrap(),
            ProblemSpec::Quadratic { d: 1000, x0_norm: 10.0 }
        );
    }

    #[test]
    fn parse_errors() {
        for s in ["quadratic", "quadratic:d=x", "cube:d=3", "sphere:d=3,k=1", "sphere:d=1", "rosenbrock:d=4,x0_norm=2"] {
            assert!(s.parse::<ProblemSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn quadratic_start_has_requested_norm() {
        let p = ProblemSpec::Quadratic { d: 100, x0_norm: 10.0 }.build(3);
        assert!((p.x0().norm() - 10.0).abs() < 1e-10);
    }
}
