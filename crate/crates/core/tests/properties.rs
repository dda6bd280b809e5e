use proptest::prelude::*;

use fracsym::cli::RunConfig;
use fracsym::functions::{self, Extension, FunctionSpec};
use fracsym::moduli;
use fracsym::{ActivationMode, ActivationParams, EvalMode, NetworkOperator, OperatorConfig, SymmetrizedDensity};

fn params(mode: ActivationMode) -> impl Strategy<Value = ActivationParams> {
    (
        prop_oneof![0.2f64..0.95, 1.05f64..4.0],
        0.2f64..6.0,
        0.3f64..=1.0,
        0.5f64..3.0,
    )
        .prop_map(move |(q, theta, alpha, scale)| ActivationParams::new(q, theta, alpha, scale, mode).unwrap())
}

fn target() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (0u64..1000).prop_map(|s| format!("pwlin:{s}")),
        (-6.0f64..6.0).prop_map(|w| format!("sin:{w}")),
        (0.1f64..1.0).prop_map(|g| format!("abs_pow:{g}")),
        (0.0f64..10.0).prop_map(|w| format!("osc:{w}")),
    ]
    .prop_map(|text| functions::build(&text, 1.0, Extension::Clamp).unwrap())
}

fn operator(n: u32, mode: EvalMode) -> NetworkOperator {
    NetworkOperator::new(
        OperatorConfig::new(n, 1e-10, mode).unwrap(),
        SymmetrizedDensity::new(ActivationParams::default()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn literal_activation_is_even(p in params(ActivationMode::Literal), x in -50.0f64..50.0) {
        prop_assert_eq!(p.phi(x), p.phi(-x));
    }

    #[test]
    fn sigmoid_is_symmetric_and_monotone(p in params(ActivationMode::Sigmoid), x in -50.0f64..50.0, dx in 1e-6f64..5.0) {
        prop_assert!((p.phi(x) + p.phi(-x) - 1.0).abs() <= 1e-14);
        prop_assert!(p.phi(x + dx) >= p.phi(x));
        prop_assert!((0.0..=1.0).contains(&p.phi(x)));
    }

    #[test]
    fn reciprocal_base_gives_same_activation(p in params(ActivationMode::Sigmoid), x in -20.0f64..20.0) {
        let r = ActivationParams::new(1.0 / p.q(), p.theta(), p.alpha(), p.scale(), p.mode()).unwrap();
        prop_assert!((p.phi(x) - r.phi(x)).abs() <= 1e-14);
    }

    #[test]
    fn sigmoid_kernel_is_even_and_nonnegative(p in params(ActivationMode::Sigmoid), x in -40.0f64..40.0) {
        let d = SymmetrizedDensity::new(p);
        let (a, b) = (d.w(x), d.w(-x));
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-15 * a.max(1e-300) + 1e-300);
    }

    #[test]
    fn literal_kernel_is_odd(p in params(ActivationMode::Literal), x in -40.0f64..40.0) {
        let d = SymmetrizedDensity::new(p);
        prop_assert!((d.w(x) + d.w(-x)).abs() <= 1e-15);
    }

    #[test]
    fn partition_sum_is_one_periodic(p in params(ActivationMode::Sigmoid), u in -20.0f64..20.0, k in -50i32..50) {
        let d = SymmetrizedDensity::new(p);
        let a = d.partition_sum(u, 1e-10).unwrap();
        let b = d.partition_sum(u + f64::from(k), 1e-10).unwrap();
        prop_assert!((a - 1.0).abs() <= 1e-8);
        prop_assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn tail_bound_shrinks_with_radius(p in params(ActivationMode::Sigmoid), eps in 1e-14f64..1e-4) {
        let d = SymmetrizedDensity::new(p);
        let r = d.tail_cutoff(eps).unwrap();
        prop_assert!(d.tail_bound(r, 2) < eps);
        prop_assert!(d.tail_bound(2.0 * r, 2) <= d.tail_bound(r, 2));
    }

    #[test]
    fn operator_is_linear(f in target(), g in target(), a in -3.0f64..3.0, b in -3.0f64..3.0,
                          n in 1u32..300, x in -1.0f64..=1.0) {
        let op = operator(n, EvalMode::Renormalized);
        let combo = FunctionSpec::linear_combination(a, &f, b, &g).unwrap();
        let lhs = op.apply(&combo, x).unwrap();
        let rhs = a * op.apply(&f, x).unwrap() + b * op.apply(&g, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn constant_shift_commutes_with_operator(f in target(), c in -10.0f64..10.0, n in 1u32..300, x in -1.0f64..=1.0) {
        let op = operator(n, EvalMode::Renormalized);
        let shifted = op.apply(&f.shifted(c), x).unwrap();
        prop_assert!((shifted - op.apply(&f, x).unwrap() - c).abs() <= 1e-10);
    }

    #[test]
    fn raw_and_renormalized_agree_for_normalized_kernel(f in target(), n in 1u32..300, x in -1.0f64..=1.0) {
        let raw = operator(n, EvalMode::Raw).apply(&f, x).unwrap();
        let ren = operator(n, EvalMode::Renormalized).apply(&f, x).unwrap();
        prop_assert!((raw - ren).abs() <= 1e-8 * (1.0 + raw.abs()));
    }

    #[test]
    fn operator_bounded_by_sup_norm(f in target(), n in 1u32..300, x in -1.0f64..=1.0) {
        let op = operator(n, EvalMode::Renormalized);
        let sup = moduli::norm_sup(&f, 1e-3).unwrap();
        prop_assert!(op.apply(&f, x).unwrap().abs() <= sup + 1e-10);
    }

    #[test]
    fn modulus_is_monotone_and_subadditive(f in target(), k in 2u32..400) {
        // t on the sample grid so that spans add exactly.
        let step = 2e-3;
        let t = f64::from(k) * step;
        let w = |t: f64| moduli::modulus(&f, t, step).unwrap().value;
        prop_assert!(w(t) <= w(1.5 * t) + 1e-15);
        prop_assert!(w(2.0 * t) <= 2.0 * w(t) + 1e-12);
    }

    #[test]
    fn second_modulus_bounded_by_first(f in target(), t in 0.01f64..0.9) {
        let step = 1e-3;
        let w1 = moduli::modulus(&f, t, step).unwrap().value;
        let w2 = moduli::modulus2(&f, t, step).unwrap().value;
        prop_assert!(w2 <= 2.0 * w1 + 1e-12);
    }

    #[test]
    fn modulus_grows_under_nested_refinement(f in target(), t in 0.2f64..0.9, m in 20u32..400) {
        let coarse_step = 2.0 / f64::from(m);
        let coarse = moduli::modulus(&f, t, coarse_step).unwrap().value;
        let fine = moduli::modulus(&f, t, coarse_step / 2.0).unwrap().value;
        prop_assert!(fine >= coarse - 1e-15);
    }

    #[test]
    fn config_round_trips(q in 1.1f64..5.0, theta in 0.1f64..5.0, alpha in 0.05f64..=1.0,
                          n in 1u32..10_000, eps in 1e-14f64..1e-3, literal: bool, raw: bool, grid in 2usize..5000) {
        let mut cfg = RunConfig::default();
        cfg.set("q", &q.to_string()).unwrap();
        cfg.set("theta", &theta.to_string()).unwrap();
        cfg.set("alpha", &alpha.to_string()).unwrap();
        cfg.set("n", &n.to_string()).unwrap();
        cfg.set("eps", &eps.to_string()).unwrap();
        cfg.set("mode", if literal { "literal" } else { "sigmoid" }).unwrap();
        cfg.set("eval-mode", if raw { "raw" } else { "renormalized" }).unwrap();
        cfg.set("grid", &grid.to_string()).unwrap();
        let mut back = RunConfig::default();
        back.apply_config_text(&cfg.to_config_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
