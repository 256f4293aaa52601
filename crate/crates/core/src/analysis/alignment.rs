use serde::{Deserialize, Serialize};

use crate::estimator::Objective;
use crate::optimizer::OptimizerState;
use crate::vector::dot;

/// Squared cosine between the momentum and the gradient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub cos2_rho: f64,
    /// The gradient (or the momentum) was zero; `cos2_rho` is reported as 0.
    pub degenerate: bool,
}

/// `(m·∇f)² / (‖m‖²‖∇f‖²)`, or 0 flagged as degenerate if either vector is zero.
pub fn alignment(m: &[f64], grad: &[f64]) -> Alignment {
    let mg = dot(m, grad);
    let mm = dot(m, m);
    let gg = dot(grad, grad);
    if mm == 0.0 || gg == 0.0 || !(mm * gg).is_finite() {
        return Alignment { cos2_rho: 0.0, degenerate: true };
    }
    Alignment { cos2_rho: ((mg * mg) / mm / gg).min(1.0), degenerate: false }
}

/// Alignment of the state's momentum with `∇f(x_t)`. `None` before the first
/// step, for momentum-free methods, or when `f` has no gradient.
pub fn track_alignment<F: Objective<f64> + ?Sized>(state: &OptimizerState<f64>, f: &F) -> Option<Alignment> {
    let m = state.m.as_ref()?;
    let g = f.grad(&state.x)?;
    Some(alignment(m, &g))
}
