use super::{check_dim, check_finite, ConeConfig, Draw, MemoryStrategy, Method, OptimizerState, StepReport, ZerothOrderOptimizer};
use crate::error::{ConfigError, StepError};
use crate::estimator::{zoge_coefficient_in_place, Objective};
use crate::sampling::draw_u_into;
use crate::scalar::Scalar;
use crate::vector::{norm, Vector};

/// ZO-SGD with the two-point estimator along `z = √d·u`.
#[derive(Clone, Debug)]
pub struct Mezo<T: Scalar> {
    cfg: ConeConfig<T>,
    state: OptimizerState<T>,
}

impl<T: Scalar> Mezo<T> {
    pub fn new(x0: Vector<T>, cfg: ConeConfig<T>, seed: u64) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(Self { cfg, state: OptimizerState::new(x0, seed) })
    }

    fn step_buffered(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let d = self.state.dim();
        let sqrt_d = T::of(d as f64).sqrt();
        let mut z = std::mem::take(self.state.scratch());
        draw_u_into(&mut self.state.rng, dist, &mut z);
        for zi in z.iter_mut() {
            *zi = sqrt_d * *zi;
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
        for (xi, &zi) in self.state.x.iter_mut().zip(z.iter()) {
            *xi = *xi - eta * (g * zi);
        }
        self.state.scratch = Some(z);
        Ok(StepReport {
            step: t,
            coefficient: g,
            f_plus: tp.f_plus,
            f_minus: tp.f_minus,
            z_norm,
            beta_t: T::zero(),
            regenerations: 1,
        })
    }

    fn step_seed_replay(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let d = self.state.dim();
        let sqrt_d = T::of(d as f64).sqrt();
        let OptimizerState { x, rng, .. } = &mut self.state;
        let (draw, mut passes) = Draw::plan(rng, dist, d);
        let tp = zoge_coefficient_in_place(f, x, lambda, t, |x, s| {
            passes += 1;
            for (xi, ui) in x.iter_mut().zip(draw.replay(rng, d)) {
                let zi = sqrt_d * ui;
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
        for (xi, ui) in x.iter_mut().zip(draw.replay(rng, d)) {
            let zi = sqrt_d * ui;
            acc = acc + zi * zi;
            *xi = *xi - eta * (g * zi);
        }
        passes += 1;
        rng.seek(draw.end);
        Ok(StepReport {
            step: t,
            coefficient: g,
            f_plus: tp.f_plus,
            f_minus: tp.f_minus,
            z_norm: acc.sqrt(),
            beta_t: T::zero(),
            regenerations: passes,
        })
    }
}

impl<T: Scalar> ZerothOrderOptimizer<T> for Mezo<T> {
    fn method(&self) -> Method {
        Method::Mezo
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
