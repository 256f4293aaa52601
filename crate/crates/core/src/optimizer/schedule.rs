use crate::scalar::Scalar;

/// Ramp breakpoints `(t₁, t₂) = (round(T/100), round(T/10))`.
pub fn warmup_breakpoints(total_steps: u64) -> (u64, u64) {
    let t = total_steps as f64;
    ((t / 100.0).round() as u64, (t / 10.0).round() as u64)
}

/// Momentum warm-up:
///
/// ```text
/// β_t = 0.1                                                  t ≤ t₁
///     = β_f − (β_f − 0.1) / (1 + 8·((t − t₁)/(t₂ − t₁))^1.8)³  t₁ < t ≤ t₂
///     = β_f                                                  t > t₂
/// ```
///
/// The ramp ends at `β_f − (β_f − 0.1)/729`, so there is a small jump to the
/// plateau at `t₂`. Panics if `beta_final < 0.1`.
pub fn warmup_beta<T: Scalar>(t: u64, total_steps: u64, beta_final: T) -> T {
    let floor = T::of(0.1);
    assert!(beta_final >= floor, "warm-up schedule requires beta_final >= 0.1");
    let (t1, t2) = warmup_breakpoints(total_steps);
    if t <= t1 {
        floor
    } else if t <= t2 {
        let frac = T::of((t - t1) as f64) / T::of((t2 - t1) as f64);
        let base = T::one() + T::of(8.0) * frac.powf(T::of(1.8));
        beta_final - (beta_final - floor) / (base * base * base)
    } else {
        beta_final
    }
}

/// Most exploitative half-angle for a given alignment: 0 when
/// `cos²ρ > (d+4)/d²`, otherwise π/2.
pub fn theta_star<T: Scalar>(cos2_rho: T, d: usize) -> T {
    assert!(d >= 1);
    let d = T::of(d as f64);
    if cos2_rho > (d + T::of(4.0)) / (d * d) {
        T::zero()
    } else {
        T::FRAC_PI_2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn breakpoints_match_both_published_horizons() {
        assert_eq!(warmup_breakpoints(20_000), (200, 2000));
        assert_eq!(warmup_breakpoints(10_000), (100, 1000));
    }

    #[test]
    fn schedule_values() {
        assert_eq!(warmup_beta(0, 20_000, 0.99), 0.1);
        assert_eq!(warmup_beta(200, 20_000, 0.99), 0.1);
        assert!((warmup_beta(2000, 20_000, 0.99f64) - (0.99 - 0.89 / 729.0)).abs() < 1e-12);
        assert_eq!(warmup_beta(2001, 20_000, 0.99), 0.99);
        assert_eq!(warmup_beta(20_000, 20_000, 0.99), 0.99);
    }

    #[test]
    fn schedule_is_continuous_at_ramp_start() {
        let just_after = warmup_beta(201, 20_000, 0.99);
        assert!(just_after > 0.1 && just_after - 0.1 < 1e-3);
    }

    #[test]
    #[should_panic(expected = "beta_final >= 0.1")]
    fn schedule_rejects_small_beta() {
        warmup_beta(0, 100, 0.05);
    }

    #[test]
    fn theta_star_cases() {
        assert_eq!(theta_star(1.0, 1000), 0.0);
        assert_eq!(theta_star(0.0, 1000), FRAC_PI_2);
        let boundary = 1004.0 / 1_000_000.0;
        assert_eq!(theta_star(boundary, 1000), FRAC_PI_2);
        assert_eq!(theta_star(boundary * (1.0 + 1e-12), 1000), 0.0);
    }
}
