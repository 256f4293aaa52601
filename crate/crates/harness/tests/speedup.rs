use conmezo_harness::{mean_curve, speedup, speedup_ratio, Curve};

fn decay(rate: f64, horizon: u64, every: u64) -> Curve {
    (0..=horizon / every).map(|k| (k * every, 100.0 * (-rate * (k * every) as f64).exp())).collect()
}

/// Independent oracle: linear scan for the first index strictly after the
/// start whose value does not exceed the target.
fn brute_force_crossing(cone: &[(u64, f64)], target: f64) -> Option<u64> {
    let mut i = 1;
    while i < cone.len() {
        if !(cone[i].1 > target) {
            return Some(cone[i].0);
        }
        i += 1;
    }
    None
}

#[test]
fn identical_trajectories_give_unit_speedup() {
    let c = decay(1e-4, 100_000, 100);
    assert_eq!(speedup_ratio(&c, &c), (Some(1.0), Some(100_000)));
}

#[test]
fn crossing_at_40816_gives_ratio_2_45() {
    let base: Curve = vec![(0, 10.0), (50_000, 2.0), (100_000, 1.0)];
    let cone: Curve = vec![(0, 10.0), (40_815, 1.000001), (40_816, 1.0), (100_000, 0.5)];
    let (ratio, step) = speedup_ratio(&cone, &base);
    assert_eq!(step, Some(40_816));
    assert!((ratio.unwrap() - 2.45).abs() < 1e-4);
}

#[test]
fn matches_brute_force_scan_on_hand_built_curves() {
    for (rate_cone, rate_base, every) in [(3e-4, 1e-4, 10), (2e-4, 1e-4, 100), (1.01e-4, 1e-4, 7), (5e-4, 4e-4, 1000)] {
        let base = decay(rate_base, 100_000, every);
        let cone = decay(rate_cone, 100_000, every);
        let target = base.last().unwrap().1;
        let expected = brute_force_crossing(&cone, target).unwrap();
        let (ratio, step) = speedup_ratio(&cone, &base);
        assert_eq!(step, Some(expected));
        assert_eq!(ratio, Some(base.last().unwrap().0 as f64 / expected as f64));
        let analytic = rate_cone / rate_base;
        assert!((ratio.unwrap() - analytic).abs() / analytic < 0.02, "{ratio:?} vs {analytic}");
    }
}

#[test]
fn unreached_target_is_flagged_not_fatal() {
    let base = decay(2e-4, 10_000, 10);
    let cone = decay(1e-4, 10_000, 10);
    assert_eq!(speedup_ratio(&cone, &base), (None, None));
    let r = speedup(&[cone], &[base]).unwrap();
    assert_eq!(r.ratio, None);
    assert_eq!(r.per_seed, vec![None]);
}

#[test]
fn mean_curve_is_the_pointwise_arithmetic_mean() {
    let a: Curve = vec![(0, 1.0), (10, 0.5), (20, 0.25)];
    let b: Curve = vec![(0, 3.0), (10, 1.5), (20, 0.0)];
    let c: Curve = vec![(0, 2.0), (10, 1.0), (20, 0.5)];
    let m = mean_curve(&[a.clone(), b.clone(), c.clone()]).unwrap();
    for (i, &(step, v)) in m.iter().enumerate() {
        assert_eq!(step, a[i].0);
        assert_eq!(v, (a[i].1 + b[i].1 + c[i].1) / 3.0);
    }
    assert!(mean_curve(&[a.clone(), vec![(0, 1.0), (11, 1.0), (20, 1.0)]]).is_err());
    assert!(mean_curve(&[]).is_err());
}

#[test]
fn speedup_uses_seed_means_and_reports_per_seed_ratios() {
    let base = vec![decay(1e-4, 10_000, 10), decay(1e-4, 10_000, 10)];
    let cone = vec![decay(2e-4, 10_000, 10), decay(4e-4, 10_000, 10)];
    let r = speedup(&cone, &base).unwrap();
    assert_eq!(r.horizon, 10_000);
    assert_eq!(r.target, mean_curve(&base).unwrap().last().unwrap().1);
    let per: Vec<f64> = r.per_seed.iter().map(|v| v.unwrap()).collect();
    assert!((per[0] - 2.0).abs() < 0.01 && (per[1] - 4.0).abs() < 0.02, "{per:?}");
    let ratio = r.ratio.unwrap();
    assert!(ratio > per[0] && ratio < per[1]);
}
