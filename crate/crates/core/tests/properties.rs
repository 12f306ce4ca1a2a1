use cks_toolkit::conditions::{full_report, ConditionId, Subject};
use cks_toolkit::equivalence::{find_equivalence, growth_bound, BoundSide};
use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::legendre::{legendre_at, legendre_table};
use cks_toolkit::numerics::{ln_factorial, log_add_exp, logsumexp_series, LogValue};
use cks_toolkit::sequences::{log_shape, sequences_equivalent, AlphaSequence, Shape};
use cks_toolkit::Status;
use proptest::prelude::*;

fn catalog_entry(which: u8, p: f64) -> GrowthFunction {
    match which % 4 {
        0 => GrowthFunction::ks(p * 0.9).unwrap(),
        1 => GrowthFunction::ks_dual(p * 0.9).unwrap(),
        2 => GrowthFunction::exp_scaled(0.25 + 3.0 * p).unwrap(),
        _ => GrowthFunction::bell_dual(2 + (p > 0.5) as u32).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_add_exp_matches_direct(a in -30.0f64..30.0, b in -30.0f64..30.0) {
        let direct = (a.exp() + b.exp()).ln();
        prop_assert!((log_add_exp(a, b) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn geometric_series(q in 0.01f64..0.9) {
        let s = logsumexp_series(|n| LogValue::from_ln(n as f64 * q.ln()), 1e-13, 10_000).unwrap();
        let want = 1.0 / (1.0 - q);
        prop_assert!((s.sum.to_real() - want).abs() <= 1e-11 * want);
    }

    #[test]
    fn legendre_is_log_concave_and_decreasing_at_large_t(which in 0u8..4, p in 0.0f64..1.0) {
        let u = catalog_entry(which, p);
        let l = legendre_table(&u, 30).unwrap().log_ell_f64();
        for n in 0..l.len() - 2 {
            prop_assert!(l[n] + l[n + 2] - 2.0 * l[n + 1] <= 1e-8 * (1.0 + l[n + 1].abs()), "{u} at {n}");
        }
    }

    #[test]
    fn legendre_below_every_sample(which in 0u8..4, p in 0.0f64..1.0, t in 0.1f64..40.0, x in -5.0f64..5.0) {
        // ℓ_u(t) is an infimum, so it never exceeds u(r)/r^t at a sampled r
        let u = catalog_entry(which, p);
        let r = x.exp();
        prop_assume!(r <= u.domain_max());
        let l = legendre_at(&u, t).unwrap().ln();
        prop_assert!(l <= u.log_eval(r).unwrap() - t * x + 1e-9 * (1.0 + l.abs()));
    }

    #[test]
    fn shape_invariant_under_geometric_scaling(
        steps in prop::collection::vec(-2.0f64..2.0, 12..40),
        log_k in -5.0f64..5.0,
        log_c in -3.0f64..3.0,
    ) {
        let mut logs = vec![0.0];
        for s in &steps {
            logs.push(logs.last().unwrap() + s);
        }
        let shifted: Vec<f64> = logs.iter().enumerate().map(|(n, l)| l + log_k + n as f64 * log_c).collect();
        for shape in [Shape::LogConcave, Shape::LogConvex] {
            prop_assert_eq!(log_shape(&logs, shape).unwrap().status, log_shape(&shifted, shape).unwrap().status);
        }
    }

    #[test]
    fn sequence_equivalence_symmetric(steps in prop::collection::vec(-1.0f64..1.0, 30), c in -0.5f64..0.5) {
        let mut a = vec![0.0];
        for s in &steps {
            a.push(a.last().unwrap() + s);
        }
        let b: Vec<f64> = a.iter().enumerate().map(|(n, l)| l + 0.3 + c * n as f64).collect();
        let sa = AlphaSequence::from_logs("a", a).unwrap();
        let sb = AlphaSequence::from_logs("b", b).unwrap();
        let ab = sequences_equivalent(&sa, &sb).unwrap();
        let ba = sequences_equivalent(&sb, &sa).unwrap();
        prop_assert_eq!(ab.holds, ba.holds);
        prop_assert!((ab.c1 * ba.c2 - 1.0).abs() < 1e-9);
        prop_assert!((ab.k2 * ba.k1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn growth_bound_monotone(k in 0.1f64..5.0, a in 0.0f64..3.0, s in 0.0f64..20.0, dk in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let u = GrowthFunction::ks(0.5).unwrap();
        for side in [BoundSide::Generalized, BoundSide::Test] {
            let base = growth_bound(&u, side, k, a, s).unwrap().ln();
            let more = growth_bound(&u, side, k + dk, a + ds, s + ds).unwrap().ln();
            prop_assert!(more >= base - 1e-12);
        }
    }
}

#[test]
fn stirling_sandwich_holds() {
    for n in 1..=170 {
        let x = n as f64;
        let lf = ln_factorial(n);
        assert!(x * x.ln() - x <= lf + 1e-9);
        assert!(lf <= 1.0 + 0.5 * x * 2f64.ln() + x * (x.ln() - 1.0) + 1e-9);
    }
}

#[test]
fn constant_sequence_report() {
    let a = AlphaSequence::from_logs("one", vec![0.0; 41]).unwrap();
    let rep = full_report(&Subject::Alpha(a), 40).unwrap();
    use ConditionId::*;
    assert_eq!(rep.get(A1).constant, Some(1.0));
    for id in [A1, B2, B3, C1, C2, C3] {
        assert_eq!(rep.status(id), Status::Pass, "{id}");
    }
    for id in [C1, C2, C3] {
        assert_eq!(rep.get(id).constant, Some(1.0), "{id}");
    }
}

#[test]
fn constants_grow_with_n_and_stay_under_ceilings() {
    let u = GrowthFunction::ks(0.25).unwrap();
    let mut prev = (0.0, 0.0);
    for n in [20, 40, 80] {
        let rep = full_report(&Subject::Growth(u.clone()), n).unwrap();
        let c2 = rep.get(ConditionId::C2).constant.unwrap();
        let c3 = rep.get(ConditionId::C3).constant.unwrap();
        assert!(c2 >= prev.0 && c3 >= prev.1);
        assert!(c2 <= 4.0 * (1.0 + 1e-6) && c3 <= 2.0 * (1.0 + 1e-6));
        prev = (c2, c3);
    }
}

#[test]
fn reports_are_thread_count_independent() {
    use cks_toolkit::conditions::{full_report_with, ConditionConfig};
    let s = Subject::Growth(GrowthFunction::exp_scaled(1.0).unwrap());
    let one = full_report_with(&s, 40, &ConditionConfig { threads: Some(1), ..Default::default() }).unwrap();
    let many = full_report_with(&s, 40, &ConditionConfig { threads: Some(7), ..Default::default() }).unwrap();
    assert_eq!(one.entries, many.entries);
}

#[test]
fn equivalence_is_order_consistent() {
    let pairs = [
        (GrowthFunction::ks(0.0).unwrap(), GrowthFunction::exp_scaled(1.0).unwrap()),
        (GrowthFunction::ks(0.5).unwrap(), GrowthFunction::ks_dual(0.5).unwrap()),
        (GrowthFunction::bell_dual(2).unwrap(), GrowthFunction::bell_dual(2).unwrap().dilate(2.0)),
    ];
    for (u, v) in &pairs {
        let uv = find_equivalence(u, v, (0.5, 50.0), 30).unwrap();
        let vu = find_equivalence(v, u, (0.5, 50.0), 30).unwrap();
        assert_eq!(uv.holds, vu.holds, "{u} vs {v}");
        if uv.holds {
            assert!((uv.c1 * vu.c2 - 1.0).abs() < 1e-9 && (uv.a1 * vu.a2 - 1.0).abs() < 1e-12);
            assert!((uv.c2 * vu.c1 - 1.0).abs() < 1e-9 && (uv.a2 * vu.a1 - 1.0).abs() < 1e-12);
        }
    }
}
