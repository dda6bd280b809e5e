//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracsym::functions::{self, builtin_functions, Extension, FunctionSpec};
use fracsym::study::{self, interior_grid, linspace, DEFAULT_N_LIST};
use fracsym::{ActivationMode, ActivationParams, EvalMode, NetworkOperator, OperatorConfig, SymmetrizedDensity};

const EPS: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn param_grid(mode: ActivationMode) -> Vec<ActivationParams> {
    let mut out = Vec::new();
    for q in [1.5, 2.0, E] {
        for theta in [0.5, 1.0, 5.0] {
            for alpha in [0.3, 0.7, 1.0] {
                out.push(ActivationParams::new(q, theta, alpha, 1.0, mode).unwrap());
            }
        }
    }
    out
}

fn random_offsets(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(-50.0..50.0)).collect()
}

fn default_density() -> SymmetrizedDensity {
    SymmetrizedDensity::new(ActivationParams::default())
}

fn template() -> OperatorConfig {
    OperatorConfig::new(1, EPS, EvalMode::Renormalized).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn c1_partition_of_unity() -> Outcome {
    let started = Instant::now();
    let offsets = random_offsets(1, 200);
    let mut worst = 0.0f64;
    for p in param_grid(ActivationMode::Sigmoid) {
        let d = SymmetrizedDensity::new(p);
        for &u in &offsets {
            worst = worst.max((d.partition_sum(u, EPS).unwrap() - 1.0).abs());
        }
    }
    let elapsed = started.elapsed();
    outcome(
        worst < 1e-8 && within(elapsed, 5.0),
        format!("max |Σ W(u−k) − 1| = {worst:.3e} over 27 params × 200 u (< 1e-8), {elapsed:.2?} (< 5 s)"),
    )
}

fn c2_literal_diagnosis() -> Outcome {
    let started = Instant::now();
    let offsets = random_offsets(1, 200);
    let (mut worst_int, mut worst_sum) = (0.0f64, 0.0f64);
    for p in param_grid(ActivationMode::Literal) {
        let d = SymmetrizedDensity::new(p);
        worst_int = worst_int.max(d.integrate(1e-8).unwrap().abs());
        for &u in &offsets {
            worst_sum = worst_sum.max(d.partition_sum(u, EPS).unwrap().abs());
        }
    }
    let elapsed = started.elapsed();
    outcome(
        worst_int < 1e-6 && worst_sum < 1e-6 && within(elapsed, 5.0),
        format!("literal mode: max |∫W| = {worst_int:.3e}, max |Σ W| = {worst_sum:.3e} (< 1e-6), {elapsed:.2?} (< 5 s)"),
    )
}

/// Composite 5-point Gauss-Legendre on fixed panels, with W written out
/// directly from the activation.
fn gauss_legendre_moment(p: &ActivationParams, order: i32, radius: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let w = |x: f64| 0.5 * (p.phi(x + 1.0) - p.phi(x - 1.0));
    let h = 2.0 * radius / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = -radius + (i as f64 + 0.5) * h;
        let mut s = 0.0;
        for (node, weight) in NODES.iter().zip(WEIGHTS) {
            let x = mid + 0.5 * h * node;
            s += weight * x.powi(order) * w(x);
        }
        total += 0.5 * h * s;
    }
    total
}

fn c3_moments() -> Outcome {
    let mut ok = true;
    let mut worst0 = 0.0f64;
    let mut worst1 = 0.0f64;
    let fractional = [
        ActivationParams::default(),
        ActivationParams::new(2.0, 1.0, 0.5, 1.0, ActivationMode::Sigmoid).unwrap(),
        ActivationParams::new(E, 5.0, 0.7, 1.0, ActivationMode::Sigmoid).unwrap(),
        ActivationParams::new(1.5, 0.5, 1.0, 2.0, ActivationMode::Sigmoid).unwrap(),
    ];
    for p in fractional {
        let d = SymmetrizedDensity::new(p);
        worst0 = worst0.max((d.continuous_moment(0, 1e-8).unwrap().value - 1.0).abs());
        worst1 = worst1.max(d.continuous_moment(1, 1e-9).unwrap().value.abs());
    }
    ok &= worst0 < 1e-6 && worst1 < 1e-8;

    let p = ActivationParams::default();
    let m2 = SymmetrizedDensity::new(p).continuous_moment(2, 1e-9).unwrap();
    // 200 000 panels of width 1e-3 on [-100, 100]; the tail beyond is below 1e-25.
    let oracle = gauss_legendre_moment(&p, 2, 100.0, 200_000);
    let closed = std::f64::consts::PI.powi(2) / (3.0 * 2f64.ln().powi(2)) + 1.0 / 3.0;
    ok &= (m2.value - oracle).abs() < 1e-6 && (oracle - closed).abs() < 1e-9;
    outcome(
        ok,
        format!(
            "max |M0 − 1| = {worst0:.2e} (< 1e-6), max |M1| = {worst1:.2e} (< 1e-8), \
             M2 = {:.10} vs Gauss-Legendre oracle {oracle:.10} (Δ {:.2e} < 1e-6)",
            m2.value,
            (m2.value - oracle).abs()
        ),
    )
}

fn sweep(target: &str) -> Vec<study::ConvergenceRecord> {
    let f = functions::build(target, 1.0, Extension::Clamp).unwrap();
    study::convergence_sweep(&f, &default_density(), &template(), &DEFAULT_N_LIST, &interior_grid(1.0, 1001)).unwrap()
}

fn c4_jackson_rate() -> Outcome {
    let started = Instant::now();
    let records = sweep("sin");
    let fit = study::fit_loglog_slope(&records).unwrap();
    let ratio2 = records.iter().map(|r| r.sup_error / r.omega2_bound).fold(0.0, f64::max);
    let ratio1 = records.iter().map(|r| r.sup_error / r.omega_bound).fold(0.0, f64::max);
    let elapsed = started.elapsed();
    outcome(
        (fit.slope + 2.0).abs() <= 0.3 && fit.r_squared >= 0.98 && ratio2.is_finite() && within(elapsed, 60.0),
        format!(
            "sin(πx/2): slope {:.4} (−2 ± 0.3), r² {:.5} (≥ 0.98), max sup_error/ω₂(f,1/n) = {ratio2:.4}, \
             max sup_error/ω(f,1/n) = {ratio1:.4}, {elapsed:.2?} (< 60 s)",
            fit.slope, fit.r_squared
        ),
    )
}

fn c5_holder_rates() -> Outcome {
    let started = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [0.25, 0.5, 0.75] {
        let records = sweep(&format!("abs_pow:{gamma}"));
        let fit = study::fit_loglog_slope(&records).unwrap();
        let ratio = records.iter().map(|r| r.sup_error / r.omega_bound).fold(0.0, f64::max);
        ok &= (fit.slope + gamma).abs() <= 0.2;
        parts.push(format!("γ={gamma}: slope {:.4}, max err/ω {ratio:.3}", fit.slope));
    }
    let elapsed = started.elapsed();
    ok &= within(elapsed, 90.0);
    outcome(ok, format!("{} (−γ ± 0.2), {elapsed:.2?} (< 90 s)", parts.join("; ")))
}

fn c6_uniform_convergence() -> Outcome {
    let d = default_density();
    let grid = interior_grid(1.0, 1001);
    let mut ok = true;
    let mut parts = Vec::new();
    for entry in builtin_functions() {
        let f = entry.build(&[], 1.0, Extension::Clamp).unwrap();
        let err = |n: u32| {
            NetworkOperator::new(template().with_n(n).unwrap(), d.clone())
                .sup_error(&f, &grid)
                .unwrap()
        };
        let (e8, e512) = (err(8), err(512));
        // A constant is reproduced exactly at every n.
        let decreasing = e512 < e8 || e8 <= 1e-10;
        let small = !entry.smooth || e512 < 1e-2;
        ok &= decreasing && small;
        parts.push(format!("{} {e8:.2e}→{e512:.2e}", entry.name));
    }
    outcome(ok, format!("sup_error n=8→512: {} (smooth targets < 1e-2 at 512)", parts.join(", ")))
}

fn c7_stability() -> Outcome {
    let d = default_density();
    let cfg = OperatorConfig::new(64, EPS, EvalMode::Renormalized).unwrap();
    let grid = linspace(-1.0, 1.0, 1001);
    let pairs = study::pwlin_pairs(50, 1.0, Extension::Clamp).unwrap();
    let outcomes = study::stability_suite(&d, &cfg, &pairs, &grid).unwrap();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let tightest = outcomes.iter().map(|o| o.gap / o.bound).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let op = NetworkOperator::new(cfg, d);
    let mut worst_shift = 0.0f64;
    for i in 0..10 {
        let f = functions::build(&format!("pwlin:{}", 100 + i), 1.0, Extension::Clamp).unwrap();
        let delta = rng.gen_range(-2.0..2.0);
        let (gap, _) = op.stability_gap(&f, &f.shifted(delta), &grid).unwrap();
        worst_shift = worst_shift.max((gap - f64::abs(delta)).abs());
    }
    outcome(
        passed == 50 && worst_shift <= 1e-10,
        format!("{passed}/50 pairs with gap ≤ bound + 1e-10 (max gap/bound {tightest:.4}); constant shifts |gap − δ| ≤ {worst_shift:.2e} (≤ 1e-10)"),
    )
}

fn c8_second_moment_uniformity() -> Outcome {
    let d = default_density();
    let n_list = [4, 8, 16, 32, 64, 128, 256];
    let u_grid = linspace(0.0, 0.99, 100);
    let rows = study::second_moment_uniformity(&d, &n_list, &u_grid, EPS).unwrap();
    let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        hi - lo <= 1e-6 && hi.is_finite(),
        format!("n² Σ(k/n − x)² W(nx − k) max over u: spread {:.2e} across n = 4..256 (≤ 1e-6), constant C = {hi:.10}", hi - lo),
    )
}

fn random_target(rng: &mut ChaCha8Rng) -> FunctionSpec {
    let text = match rng.gen_range(0..5) {
        0 => format!("pwlin:{}", rng.gen_range(0..10_000)),
        1 => format!("sin:{}", rng.gen_range(-6.0..6.0)),
        2 => format!("poly:{},{},{}", rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        3 => format!("osc:{}", rng.gen_range(0.0..12.0)),
        _ => format!("abs_pow:{}", rng.gen_range(0.1..1.0)),
    };
    functions::build(&text, 1.0, Extension::Clamp).unwrap()
}

fn c9_operator_algebra() -> Outcome {
    let d = default_density();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut lin, mut cons, mut mono) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let op = NetworkOperator::new(template().with_n(rng.gen_range(1..200)).unwrap(), d.clone());
        let x = rng.gen_range(-1.0..=1.0);

        let (f, g) = (random_target(&mut rng), random_target(&mut rng));
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let combo = FunctionSpec::linear_combination(a, &f, b, &g).unwrap();
        let lhs = op.apply(&combo, x).unwrap();
        let rhs = a * op.apply(&f, x).unwrap() + b * op.apply(&g, x).unwrap();
        lin = lin.max((lhs - rhs).abs());

        let c = rng.gen_range(-100.0..100.0);
        let constant = functions::build(&format!("const:{c}"), 1.0, Extension::Clamp).unwrap();
        cons = cons.max((op.apply(&constant, x).unwrap() - c).abs());

        let h = random_target(&mut rng);
        let fe = f.clone();
        let upper = FunctionSpec::new("f+h²", vec![], 1.0, Extension::Clamp, move |t| fe.eval(t) + h.eval(t).powi(2)).unwrap();
        mono = mono.max(op.apply(&f, x).unwrap() - op.apply(&upper, x).unwrap());
    }
    outcome(
        lin <= 1e-10 && cons <= 1e-10 && mono <= 1e-12,
        format!("100 instances each: linearity residual {lin:.2e} (≤ 1e-10), constant residual {cons:.2e} (≤ 1e-10), max S f − S g for f ≤ g {mono:.2e} (≤ 1e-12)"),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_fracsym"))
            .args(["converge", "--fn", "sin", "--out"])
            .arg(&path)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    outcome(!a.is_empty() && a == b, format!("two `converge` runs: {} bytes each, identical = {}", a.len(), a == b))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 partition of unity", c1_partition_of_unity),
        ("2 literal-mode diagnosis", c2_literal_diagnosis),
        ("3 moments", c3_moments),
        ("4 Jackson rate, C² target", c4_jackson_rate),
        ("5 Hölder-rate family", c5_holder_rates),
        ("6 uniform convergence", c6_uniform_convergence),
        ("7 stability, C = 1", c7_stability),
        ("8 second-moment uniformity", c8_second_moment_uniformity),
        ("9 operator algebra", c9_operator_algebra),
        ("10 determinism", c10_determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let result = check();
        if !result.pass {
            failures += 1;
        }
        println!("[{}] {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
