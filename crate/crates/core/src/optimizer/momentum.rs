use super::{check_dim, check_finite, ConeConfig, Draw, MemoryStrategy, Method, OptimizerState, StepReport, ZerothOrderOptimizer};
use crate::error::{ConfigError, StepError};
use crate::estimator::{zoge_coefficient_in_place, Objective};
use crate::sampling::draw_u_into;
use crate::scalar::Scalar;
use crate::vector::{norm, Vector};

/// MeZO whose update direction is the momentum of the estimates instead of
/// the latest estimate. Directions are unbiased sphere draws.
#[derive(Clone, Debug)]
pub struct MezoMomentum<T: Scalar> {
    cfg: ConeConfig<T>,
    state: OptimizerState<T>,
}

impl<T: Scalar> MezoMomentum<T> {
    pub fn new(x0: Vector<T>, cfg: ConeConfig<T>, seed: u64) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(Self { cfg, state: OptimizerState::new(x0, seed) })
    }

    fn step_buffered(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let beta = self.cfg.beta_at(t);
        let sqrt_d = T::of(self.state.dim() as f64).sqrt();
        let mut z = std::mem::take(self.state.scratch());
        draw_u_into(&mut self.state.rng, dist, &mut z);
        if self.state.m.is_none() {
            self.state.m = Some(z.clone());
        }
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
        let keep = T::one() - beta;
        let m = self.state.m.as_mut().expect("momentum initialized above");
        for ((xi, mi), &zi) in self.state.x.iter_mut().zip(m.iter_mut()).zip(z.iter()) {
            *mi = beta * *mi + keep * (g * zi);
            *xi = *xi - eta * *mi;
        }
        self.state.scratch = Some(z);
        Ok(StepReport {
            step: t,
            coefficient: g,
            f_plus: tp.f_plus,
            f_minus: tp.f_minus,
            z_norm,
            beta_t: beta,
            regenerations: 1,
        })
    }

    fn step_seed_replay(&mut self, f: &dyn Objective<T>) -> Result<StepReport<T>, StepError> {
        let ConeConfig { eta, lambda, dist, .. } = self.cfg;
        let t = self.state.t;
        let d = self.state.dim();
        let beta = self.cfg.beta_at(t);
        let keep = T::one() - beta;
        let sqrt_d = T::of(d as f64).sqrt();
        let OptimizerState { x, m, rng, .. } = &mut self.state;
        let (draw, mut passes) = Draw::plan(rng, dist, d);
        if m.is_none() {
            passes += 1;
            *m = Some(Vector::from_vec(draw.replay(rng, d).collect()));
        }
        let m = m.as_mut().expect("momentum initialized above");
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
        for ((xi, mi), ui) in x.iter_mut().zip(m.iter_mut()).zip(draw.replay(rng, d)) {
            let zi = sqrt_d * ui;
            acc = acc + zi * zi;
            *mi = beta * *mi + keep * (g * zi);
            *xi = *xi - eta * *mi;
        }
        passes += 1;
        rng.seek(draw.end);
        Ok(StepReport {
            step: t,
            coefficient: g,
            f_plus: tp.f_plus,
            f_minus: tp.f_minus,
            z_norm: acc.sqrt(),
            beta_t: beta,
            regenerations: passes,
        })
    }
}

impl<T: Scalar> ZerothOrderOptimizer<T> for MezoMomentum<T> {
    fn method(&self) -> Method {
        Method::MezoMomentum
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
