use thiserror::Error;

/// Which side of the two-point difference produced a bad value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Plus => "x + λz",
            Side::Minus => "x - λz",
        })
    }
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("objective returned {value} at {side} (step {step})")]
    NonFiniteValue {
        step: u64,
        side: Side,
        value: f64,
        /// The perturbed point at which the objective was evaluated.
        point: Vec<f64>,
    },
    #[error("non-finite gradient estimate at step {step}")]
    NonFiniteEstimate { step: u64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("theta must lie in [0, pi/2], got {0}")]
    Theta(f64),
    #[error("beta must lie in [0, 1], got {0}")]
    Beta(f64),
    #[error("warm-up requires beta_final >= 0.1, got {0}")]
    WarmupBeta(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("total_steps must be at least 1")]
    NoSteps,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}
