//! Acceptance criteria, one PASS/FAIL line each.
//!
//! `cargo test --release -p conmezo-harness --test acceptance` runs all eleven;
//! trailing numbers select a subset (`-- 8 10`). Criteria run one at a time so
//! the timing comparison has the machine to itself.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use conmezo::analysis::{
    angle_tail, inner_product_concentration, momentum_with_alignment, optimal_eta, verify_cone_moments_at,
    verify_descent, verify_vanilla_moments, Check, MomentReport,
};
use conmezo::problems::make_benchmark_quadratic;
use conmezo::rng::{RngStream, ANALYSIS_STREAM};
use conmezo::sampling::{sample_gaussian, sample_unit_sphere};
use conmezo::{
    warmup_beta, ConeConfig, Counted, Direction, MemoryStrategy, Method, Objective, Vector, Warmup,
};
use conmezo_harness::{bench_step_time, reproduce_fig2, BenchSpec, Fig2Config};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    (1, "quadratic speedup over MeZO >= 2.0", speedup),
    (2, "cone first moment", cone_first_moment),
    (3, "cone second moment and its bound", cone_second_moment),
    (4, "sphere-direction moments", vanilla_moments),
    (5, "inner-product concentration", inner_product),
    (6, "cone angle tail", cone_angle_tail),
    (7, "one-step descent inequality", descent),
    (8, "reduction and equivalence invariants", reductions),
    (9, "nonconvex rate sanity", nonconvex_rate),
    (10, "warm-up schedule", warmup),
    (11, "buffered step faster than 4-pass seed replay", timing),
];

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, check) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let outcome = check();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id:>2} ({name}): {} [{:.1}s]", outcome.detail, started.elapsed().as_secs_f64());
        failed += usize::from(!outcome.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn speedup() -> Outcome {
    let report = match reproduce_fig2(&Fig2Config::default(), workers(), None, |_| {}) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("protocol failed: {e}")),
    };
    let s = &report.speedup;
    let per_seed: Vec<String> =
        s.per_seed.iter().map(|r| r.map_or("none".into(), |v| format!("{v:.2}"))).collect();
    let detail = format!(
        "ratio={} crossing={:?}/{} mezo[{}] final={:.4e} conmezo[{}] final={:.4e} per_seed=[{}]",
        s.ratio.map_or("none".into(), |r| format!("{r:.3}")),
        s.crossing_step,
        s.horizon,
        report.mezo.tuning.best().id,
        report.mezo.final_mean,
        report.conmezo.tuning.best().id,
        report.conmezo.final_mean,
        per_seed.join(", ")
    );
    Outcome::new(report.ordering_holds && s.ratio.is_some_and(|r| r >= 2.0), detail)
}

const MOMENT_DIMS: [usize; 4] = [2, 10, 50, 500];
const MOMENT_THETAS: [f64; 5] = [0.0, 0.5, 1.0, 1.35, FRAC_PI_2];
const MOMENT_SAMPLES: u64 = 200_000;

struct MomentCell {
    a_norm: f64,
    report: MomentReport,
}

/// One random `(a, m̂)` per grid cell; shared by criteria 2 and 3.
fn moment_grid() -> &'static [MomentCell] {
    static GRID: OnceLock<Vec<MomentCell>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut rng = RngStream::with_stream(2024, ANALYSIS_STREAM);
        let mut cells = Vec::new();
        for d in MOMENT_DIMS {
            for theta in MOMENT_THETAS {
                let a: Vector<f64> = sample_gaussian(&mut rng, d);
                let m_hat: Vector<f64> = sample_unit_sphere(&mut rng, d);
                let report = verify_cone_moments_at(&a, &m_hat, theta, MOMENT_SAMPLES, &mut rng);
                cells.push(MomentCell { a_norm: a.norm(), report });
            }
        }
        cells
    })
}

/// `|observed − expected| ≤ 5·SE`, plus a rounding allowance for cells whose
/// estimate is deterministic (θ = 0).
fn within_five_se(c: &Check, rounding: f64) -> bool {
    let se = c.std_error.expect("two-sided checks carry a standard error");
    (c.statistic - c.expected).abs() <= 5.0 * se + rounding
}

fn worst_z(checks: &[&Check]) -> f64 {
    checks.iter().filter_map(|c| c.z_score).map(f64::abs).fold(0.0, f64::max)
}

fn cone_first_moment() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = Vec::new();
    for cell in moment_grid() {
        let r = &cell.report;
        let rounding = 1e-9 * r.d as f64 * cell.a_norm;
        for c in r.checks.iter().filter(|c| c.name.starts_with("first_moment/")) {
            if !within_five_se(c, rounding) {
                failures.push(format!("d={} θ={:.4} {}", r.d, r.theta, c));
            }
            checks.push(c);
        }
    }
    let detail = format!("{} projections over 20 cells, worst |z|={:.2}", checks.len(), worst_z(&checks));
    outcome_with_failures(detail, failures)
}

fn cone_second_moment() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut worst_bound_ratio = 0.0f64;
    let mut exact_checks = Vec::new();
    for cell in moment_grid() {
        let r = &cell.report;
        let rounding = 1e-9 * (r.d as f64 * cell.a_norm).powi(2);
        let find = |name: &str| r.checks.iter().find(|c| c.name == name).expect("moment check present");
        let exact = find("second_moment/exact");
        let rel = (r.empirical_second - r.analytic_second_exact).abs() / r.analytic_second_exact;
        worst_rel = worst_rel.max(rel);
        worst_bound_ratio = worst_bound_ratio.max(r.analytic_second_exact / r.analytic_second_bound);
        if !within_five_se(exact, rounding) || rel > 0.01 {
            failures.push(format!("d={} θ={:.4} {exact} rel={rel:.2e}", r.d, r.theta));
        }
        for name in ["second_moment/exact_le_bound", "second_moment/empirical_le_bound"] {
            let c = find(name);
            if !c.passed {
                failures.push(format!("d={} θ={:.4} {c}", r.d, r.theta));
            }
        }
        exact_checks.push(exact);
    }
    let detail = format!(
        "worst |z|={:.2}, worst rel={worst_rel:.2e}, max exact/bound={worst_bound_ratio:.6}",
        worst_z(&exact_checks)
    );
    outcome_with_failures(detail, failures)
}

fn vanilla_moments() -> Outcome {
    let mut rng = RngStream::with_stream(4, ANALYSIS_STREAM);
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for d in [10, 100, 1000] {
        let r = verify_vanilla_moments(d, MOMENT_SAMPLES, &mut rng);
        let a_norm = (r.exact_second / d as f64).sqrt();
        for c in &r.checks {
            let ok = if c.name.starts_with("vanilla_mean/") {
                within_five_se(c, 1e-9 * d as f64 * a_norm)
            } else {
                c.passed
            };
            if !ok {
                failures.push(format!("d={d} {c}"));
            }
        }
        notes.push(format!("d={d}: E‖g‖²/(d‖a‖²)={:.4} (limit 2)", r.empirical_second / r.exact_second));
    }
    outcome_with_failures(notes.join(", "), failures)
}

fn inner_product() -> Outcome {
    let mut rng = RngStream::with_stream(5, ANALYSIS_STREAM);
    let low = inner_product_concentration(100, 10_000, &mut rng);
    let high = inner_product_concentration(10_000, 10_000, &mut rng);
    let ratio = low.median_abs / high.median_abs;
    let passed = low.median_abs <= low.median_bound && high.median_abs <= high.median_bound && (7.0..=13.0).contains(&ratio);
    let detail = format!(
        "median d=100 {:.4e} (≤ {:.4e}), d=10^4 {:.4e} (≤ {:.4e}), ratio {ratio:.3}",
        low.median_abs, low.median_bound, high.median_abs, high.median_bound
    );
    Outcome::new(passed, detail)
}

fn cone_angle_tail() -> Outcome {
    let mut rng = RngStream::with_stream(6, ANALYSIS_STREAM);
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (d, limit) in [(10, None), (100, Some(0.1)), (1000, Some(1e-3))] {
        let r = angle_tail(d, 1.0, 0.9, 10_000, &mut rng);
        if r.empirical > r.bound {
            failures.push(format!("d={d}: tail {} exceeds bound {}", r.empirical, r.bound));
        }
        if let Some(limit) = limit {
            if r.empirical >= limit {
                failures.push(format!("d={d}: tail {} not below {limit}", r.empirical));
            }
        }
        if r.max_norm_error > 1e-10 {
            failures.push(format!("d={d}: sample norm off by {:e}", r.max_norm_error));
        }
        notes.push(format!("d={d} P={:.4e} bound={:.4e}", r.empirical, r.bound));
    }
    outcome_with_failures(notes.join(", "), failures)
}

fn descent() -> Outcome {
    let d = 200;
    let f = make_benchmark_quadratic::<f64>(d, 7);
    let x = f.x0().clone();
    let a = f.grad(&x).expect("quadratic gradient");
    let ell = f.smoothness().expect("quadratic smoothness");
    let mut rng = RngStream::with_stream(7, ANALYSIS_STREAM);
    let mut failures = Vec::new();
    let mut worst_z = f64::NEG_INFINITY;
    for cos2 in [0.0, 0.25, 1.0] {
        let m = momentum_with_alignment(&a, cos2, &mut rng);
        for theta in [0.0, 1.3, FRAC_PI_2] {
            let eta = optimal_eta(cos2, theta, ell, d);
            let r = verify_descent(&f, &x, &m, theta, eta, 100_000, &mut rng);
            if let Some(z) = r.check.z_score {
                worst_z = worst_z.max(z);
            }
            if !r.check.passed {
                failures.push(r.check.to_string());
            }
        }
    }
    outcome_with_failures(format!("9 cells, largest (mean − bound)/SE = {worst_z:.2}"), failures)
}

fn cfg(theta: f64, beta: f64, eta: f64, memory: MemoryStrategy) -> ConeConfig<f64> {
    ConeConfig { theta, beta, eta, lambda: 0.01, total_steps: 1000, memory, ..ConeConfig::default() }
}

/// Iterates after every step.
fn iterates(method: Method, c: ConeConfig<f64>, f: &dyn Objective<f64>, x0: &Vector<f64>, seed: u64) -> Vec<Vec<f64>> {
    let steps = c.total_steps;
    let mut opt = method.build(x0.clone(), c, seed).expect("valid config");
    (0..steps)
        .map(|_| {
            opt.step(f).expect("finite step");
            opt.x().to_vec()
        })
        .collect()
}

fn bits(xs: &[Vec<f64>]) -> Vec<Vec<u64>> {
    xs.iter().map(|x| x.iter().map(|v| v.to_bits()).collect()).collect()
}

fn reductions() -> Outcome {
    let f = make_benchmark_quadratic::<f64>(1000, 3);
    let x0 = f.x0().clone();
    let mut failures = Vec::new();
    let mut worst_gap = 0.0f64;
    for memory in [MemoryStrategy::SeedReplay, MemoryStrategy::Buffered] {
        for dist in [Direction::UnitSphere, Direction::Gaussian] {
            let eta = if dist == Direction::Gaussian { 1e-6 } else { 1e-3 };
            let with = |theta, beta| ConeConfig { dist, ..cfg(theta, beta, eta, memory) };
            let mezo = bits(&iterates(Method::Mezo, with(1.0, 0.9), &f, &x0, 11));
            let cone = bits(&iterates(Method::Conmezo, with(FRAC_PI_2, 0.9), &f, &x0, 11));
            let mom = bits(&iterates(Method::MezoMomentum, with(1.0, 0.0), &f, &x0, 11));
            if cone != mezo {
                failures.push(format!("(a) ConMeZO(θ=π/2) differs from MeZO, {memory:?} {dist:?}"));
            }
            if mom != mezo {
                failures.push(format!("(b) MeZO+Momentum(β=0) differs from MeZO, {memory:?} {dist:?}"));
            }
        }
    }
    for method in Method::ALL {
        let a = iterates(method, cfg(1.4, 0.99, 1e-3, MemoryStrategy::SeedReplay), &f, &x0, 5);
        let b = iterates(method, cfg(1.4, 0.99, 1e-3, MemoryStrategy::Buffered), &f, &x0, 5);
        let gap = a
            .iter()
            .zip(&b)
            .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        worst_gap = worst_gap.max(gap);
        if gap > 1e-12 {
            failures.push(format!("(c) {method}: strategies differ by {gap:e}"));
        }
    }
    let counted = Counted::new(&f);
    for method in Method::ALL {
        for memory in [MemoryStrategy::SeedReplay, MemoryStrategy::Buffered] {
            counted.reset();
            let mut opt = method.build(x0.clone(), cfg(1.3, 0.9, 1e-3, memory), 1).expect("valid config");
            for _ in 0..1000 {
                opt.step(&counted).expect("finite step");
            }
            if counted.evals() != 2000 {
                failures.push(format!("(d) {method} {memory:?}: {} evaluations in 1000 steps", counted.evals()));
            }
        }
    }
    outcome_with_failures(format!("bitwise reductions checked, strategy gap {worst_gap:.1e}"), failures)
}

fn nonconvex_rate() -> Outcome {
    let d = 1000;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let f = make_benchmark_quadratic::<f64>(d, seed);
        let ell = f.smoothness().expect("quadratic smoothness");
        let gap0 = f.value(f.x0()) - f.minimum().expect("quadratic minimum");
        let steps = 10_000;
        let c = ConeConfig {
            theta: FRAC_PI_2,
            eta: 1.0 / (2.0 * ell * d as f64),
            lambda: 1e-3,
            total_steps: steps,
            ..ConeConfig::default()
        };
        let mut opt = Method::Conmezo.build(f.x0().clone(), c, seed).expect("valid config");
        let mut sum = 0.0;
        for t in 1..=steps {
            sum += f.grad(opt.x()).expect("quadratic gradient").norm_squared();
            opt.step(&f).expect("finite step");
            if t == 1_000 || t == 10_000 {
                let bound = 2.0 * ell * d as f64 * gap0 / t as f64;
                let ratio = (sum / t as f64) / bound;
                worst = worst.max(ratio);
                if ratio > 1.5 {
                    failures.push(format!("seed {seed} T={t}: mean ‖∇f‖² is {ratio:.3} × bound"));
                }
            }
        }
    }
    outcome_with_failures(format!("largest mean/bound = {worst:.4} (limit 1.5)"), failures)
}

fn warmup() -> Outcome {
    let total = 20_000;
    // Independently evaluated: 0.99 − 0.89/(1 + 8·0.5^1.8)³ and 0.99 − 0.89/729.
    let expected: [(u64, f64); 5] = [(0, 0.1), (200, 0.1), (1100, 0.965_175_734_594_781_2), (2000, 0.988_779_149_519_890_2), (20_000, 0.99)];
    let mut failures = Vec::new();
    for (t, want) in expected {
        let got = warmup_beta(t, total, 0.99);
        if (got - want).abs() > 1e-5 {
            failures.push(format!("β_{t} = {got}, expected {want}"));
        }
    }
    let dense: Vec<f64> = (0..=total).map(|t| warmup_beta(t, total, 0.99)).collect();
    if let Some(t) = dense.windows(2).position(|w| w[1] < w[0]) {
        failures.push(format!("schedule decreases at t = {t}"));
    }
    let c = ConeConfig::<f64> { warmup: Warmup::Staged, total_steps: total, ..ConeConfig::default() };
    if (0..=total).any(|t| c.beta_at(t) != dense[t as usize]) {
        failures.push("optimizer config disagrees with the schedule".into());
    }
    let shown: Vec<String> = expected.iter().map(|&(t, _)| format!("β_{t}={:.5}", dense[t as usize])).collect();
    outcome_with_failures(shown.join(" "), failures)
}

fn timing() -> Outcome {
    let d = 10_000_000;
    let mut cone = BenchSpec::new(Method::Conmezo, d, MemoryStrategy::Buffered);
    cone.dist = Direction::UnitSphere;
    let mut mezo = BenchSpec::new(Method::Mezo, d, MemoryStrategy::SeedReplay);
    mezo.dist = Direction::Gaussian;
    let run = |spec: &BenchSpec| bench_step_time(spec).map_err(|e| e.to_string());
    match (run(&cone), run(&mezo)) {
        (Ok(c), Ok(m)) => {
            let detail = format!(
                "median ConMeZO buffered {:.2} ms ({} pass), MeZO seed replay {:.2} ms ({} passes), {:.1}% faster",
                c.median_ns / 1e6,
                c.regenerations,
                m.median_ns / 1e6,
                m.regenerations,
                100.0 * (1.0 - c.median_ns / m.median_ns)
            );
            Outcome::new(m.regenerations == 4 && c.median_ns < m.median_ns, detail)
        }
        (c, m) => Outcome::new(false, format!("bench failed: {:?} {:?}", c.err(), m.err())),
    }
}

fn outcome_with_failures(detail: String, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{detail}; {}", failures.join("; ")))
    }
}
