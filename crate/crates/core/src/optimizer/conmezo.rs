use super::{check_dim, check_finite, ConeConfig, Draw, MemoryStrategy, Method, OptimizerState, StepReport, ZerothOrderOptimizer};
use crate::error::{ConfigError, StepError};
use crate::estimator::{zoge_coefficient_in_place, Objective, TwoPoint};
use crate::sampling::{draw_u_into, ConeFrame};
use crate::scalar::Scalar;
use crate::vector::{norm, Vector};

/// Below this `cos θ` seed replay stops recovering the momentum from `z`
/// (the recovery divides by `cos θ`) and regenerates per pass instead.
const MIN_RECOVERY_COS: f64 = 1e-6;

/// Zeroth-order descent along directions sampled from a cone of half-angle θ
/// around the momentum of past estimates.
#[derive(Clone, Debug)]
pub struct ConMezo<T: Scalar> {
    cfg: ConeConfig<T>,
    state: OptimizerState<T>,
}

impl<T: Scalar> ConMezo<T> {
    pub fn new(x0: Vector<T>, cfg: ConeConfig<T>, seed: u64) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(Self { cfg, state: OptimizerState::new(x0, seed) })
    }

    fn step_buffered(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { theta, eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let beta = self.cfg.beta_at(t);
        let mut z = std::mem::take(self.state.scratch());
        draw_u_into(&mut self.state.rng, dist, &mut z);
        let m = self.state.m.get_or_insert_with(|| z.clone());
        let frame = ConeFrame::new(theta, m);
        for (zi, &mi) in z.iter_mut().zip(m.iter()) {
            *zi = frame.coord(mi, *zi);
        }
        let z_norm = norm(&z);
        let tp = zoge_coefficient_in_place(f, &mut self.state.x, lambda, t, |x, s| {
            for (xi, &zi) in x.iter_mut().zip(z.iter()) {
                *xi = *xi + s * (lambda * zi);
            }
        });
        let tp = match tp {
            Ok(tp) => tp,
            Err(e) => {
                self.state.scratch = Some(z);
                return Err(e);
            }
        };
        let g = tp.coefficient;
        let keep = T::one() - beta;
        let m = self.state.m.as_mut().expect("momentum initialized above");
        for ((xi, mi), &zi) in self.state.x.iter_mut().zip(m.iter_mut()).zip(z.iter()) {
            let gz = g * zi;
            *xi = *xi - eta * gz;
            *mi = beta * *mi + keep * gz;
        }
        self.state.scratch = Some(z);
        Ok(report(t, tp, z_norm, beta, 1))
    }

    fn step_seed_replay(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { theta, eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let d = self.state.dim();
        let beta = self.cfg.beta_at(t);
        let keep = T::one() - beta;
        let OptimizerState { x, m, rng, .. } = &mut self.state;
        let (draw, mut passes) = Draw::plan(rng, dist, d);
        if m.is_none() {
            passes += 1;
            *m = Some(Vector::from_vec(draw.replay(rng, d).collect()));
        }
        let m = m.as_mut().expect("momentum initialized above");
        let frame = ConeFrame::new(theta, m);

        if !frame.is_degenerate() && frame.cos >= T::of(MIN_RECOVERY_COS) {
            // z overwrites the momentum buffer for the duration of the step.
            for (mi, ui) in m.iter_mut().zip(draw.replay(rng, d)) {
                *mi = frame.coord(*mi, ui);
            }
            passes += 1;
            let z_norm = norm(m);
            let tp = zoge_coefficient_in_place(f, x, lambda, t, |x, s| {
                for (xi, &zi) in x.iter_mut().zip(m.iter()) {
                    *xi = *xi + s * (lambda * zi);
                }
            });
            let g = match &tp {
                Ok(tp) => tp.coefficient,
                // Put the momentum back before bailing out.
                Err(_) => T::zero(),
            };
            let (sqrt_d, sin, cos, axis_norm) = (frame.sqrt_d, frame.sin, frame.cos, frame.axis_norm);
            for ((xi, mi), ui) in x.iter_mut().zip(m.iter_mut()).zip(draw.replay(rng, d)) {
                let zi = *mi;
                let m_old = ((zi / sqrt_d - sin * ui) / cos) * axis_norm;
                if tp.is_ok() {
                    let gz = g * zi;
                    *xi = *xi - eta * gz;
                    *mi = beta * m_old + keep * gz;
                } else {
                    *mi = m_old;
                }
            }
            passes += 1;
            rng.seek(draw.end);
            return Ok(report(t, tp?, z_norm, beta, passes));
        }

        let tp = zoge_coefficient_in_place(f, x, lambda, t, |x, s| {
            passes += 1;
            for ((xi, &mi), ui) in x.iter_mut().zip(m.iter()).zip(draw.replay(rng, d)) {
                let zi = frame.coord(mi, ui);
                *xi = *xi + s * (lambda * zi);
            }
        });
        let tp = match tp {
            Ok(tp) => tp,
            Err(e) => {
                rng.seek(draw.end);
                return Err(e);
            }
        };
        let g = tp.coefficient;
        let mut acc = T::zero();
        for ((xi, mi), ui) in x.iter_mut().zip(m.iter_mut()).zip(draw.replay(rng, d)) {
            let zi = frame.coord(*mi, ui);
            acc = acc + zi * zi;
            let gz = g * zi;
            *xi = *xi - eta * gz;
            *mi = beta * *mi + keep * gz;
        }
        passes += 1;
        rng.seek(draw.end);
        Ok(report(t, tp, acc.sqrt(), beta, passes))
    }
}

fn report<T: Scalar>(step: u64, tp: TwoPoint<T>, z_norm: T, beta_t: T, regenerations: u32) -> StepReport<T> {
    StepReport {
        step,
        coefficient: tp.coefficient,
        f_plus: tp.f_plus,
        f_minus: tp.f_minus,
        z_norm,
        beta_t,
        regenerations,
    }
}

impl<T: Scalar> ZerothOrderOptimizer<T> for ConMezo<T> {
    fn method(&self) -> Method {
        Method::Conmezo
    }

    fn config(&self) -> &ConeConfig<T> {
        &self.cfg
    }

    fn state(&self) -> &OptimizerState<T> {
        &self.state
    }

    fn step(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        check_dim(&self.state, f);
        let report = match self.cfg.memory {
            MemoryStrategy::Buffered => self.step_buffered(f)?,
            MemoryStrategy::SeedReplay => self.step_seed_replay(f)?,
        };
        check_finite(&self.state, report.step)?;
        self.state.t += 1;
        Ok(report)
    }
}
