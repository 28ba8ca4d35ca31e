//! Invariants checked on generated inputs.

mod common;

use proptest::prelude::*;
use quasiconv::conditions::{
    check_a, check_b, check_c, margin_a, remargin, sigma_star_segment, CheckConfig, Condition,
};
use quasiconv::expr::{eval_dual, eval_expr, gradient};
use quasiconv::field::{fd_grad, lookup, DomainBox, ScalarField};
use quasiconv::search::{falsify, SearchBudget};
use quasiconv::VerdictStatus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.9f64..0.9, dim)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    /// Forward-mode gradients agree with central differences on smooth
    /// expressions.
    #[test]
    fn dual_gradient_matches_differences(seed in any::<u64>(), x in point(3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::smooth_expr(&mut rng, 3, 4);
        let f = ScalarField::from_expr(e, DomainBox::cube(-1.0, 1.0, 3).unwrap()).unwrap();
        let g = f.gradient(&x).unwrap();
        let fd = fd_grad(&f, &x, 1e-5).unwrap();
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{} vs {} for {}", a, b, f.name());
        }
    }

    /// The tangent is linear in the direction.
    #[test]
    fn tangent_is_linear(seed in any::<u64>(), x in point(2), d1 in point(2), d2 in point(2), s in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::smooth_expr(&mut rng, 2, 4);
        let comb: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| a + s * b).collect();
        let t1 = eval_dual(&e, &x, &d1).unwrap().deriv;
        let t2 = eval_dual(&e, &x, &d2).unwrap().deriv;
        let t = eval_dual(&e, &x, &comb).unwrap().deriv;
        prop_assert!((t - (t1 + s * t2)).abs() <= 1e-9 * (1.0 + t.abs() + t1.abs() + t2.abs()));
        let (v, g, _) = gradient(&e, &x).unwrap();
        prop_assert_eq!(v, eval_expr(&e, &x).unwrap());
        let dot: f64 = g.iter().zip(&d1).map(|(a, b)| a * b).sum();
        prop_assert!((dot - t1).abs() <= 1e-9 * (1.0 + dot.abs()));
    }

    /// Swapping the endpoints and reflecting λ leaves the (a) margin alone.
    #[test]
    fn margin_a_is_swap_symmetric(x in point(2), y in point(2), k in 1usize..64, sigma in 0.0f64..3.0) {
        let f = lookup("sqnorm", 2).unwrap();
        let cfg = CheckConfig::with_sigma(sigma);
        let l = k as f64 / 64.0;
        prop_assume!(quasiconv::vecmath::pnorm(&quasiconv::vecmath::sub(&x, &y).unwrap(), cfg.penalty_norm) >= cfg.min_sep);
        let m1 = margin_a(&f, &x, &y, l, &cfg).unwrap();
        let m2 = margin_a(&f, &y, &x, 1.0 - l, &cfg).unwrap();
        prop_assert!((m1 - m2).abs() <= 1e-12);
        let s1 = sigma_star_segment(&f, &x, &y, &cfg).unwrap().value;
        let s2 = sigma_star_segment(&f, &y, &x, &cfg).unwrap().value;
        prop_assert_eq!(s1, s2);
    }

    /// Raising σ can only lower the (a) and (b) margins.
    #[test]
    fn margins_decrease_in_sigma(x in point(1), y in point(1), s1 in 0.0f64..2.0, ds in 0.0f64..2.0) {
        let f = lookup("cubic", 1).unwrap();
        let lo = CheckConfig::with_sigma(s1);
        let hi = CheckConfig::with_sigma(s1 + ds);
        let (a_lo, a_hi) = (check_a(&f, &x, &y, &lo), check_a(&f, &x, &y, &hi));
        if let (Some(p), Some(q)) = (a_lo.margin, a_hi.margin) {
            prop_assert!(q <= p + 1e-15);
        }
        let (b_lo, b_hi) = (check_b(&f, &x, &y, &lo), check_b(&f, &x, &y, &hi));
        if let (Some(p), Some(q)) = (b_lo.margin, b_hi.margin) {
            prop_assert!(q <= p + 1e-15);
        }
    }

    /// Every (c) violation is matched by a (b) violation on the pair or its
    /// swap.
    #[test]
    fn c_violations_imply_b_violations(x in prop::collection::vec(0.0f64..std::f64::consts::TAU, 1), y in prop::collection::vec(0.0f64..std::f64::consts::TAU, 1), sigma in 0.0f64..1.0) {
        let f = lookup("sin", 1).unwrap();
        let cfg = CheckConfig::with_sigma(sigma);
        let c = check_c(&f, &x, &y, &cfg);
        if c.status == VerdictStatus::Violated {
            prop_assert!(quasiconv::conditions::c_violation_explained_by_b(&f, &x, &y, &cfg));
        }
    }

    /// Stored witnesses reproduce their margins exactly.
    #[test]
    fn witnesses_reproduce(x in point(1), y in point(1)) {
        let f = lookup("cubic_minus_x", 1).unwrap();
        let cfg = CheckConfig::default();
        for (cond, v) in [(Condition::B, check_b(&f, &x, &y, &cfg)), (Condition::C, check_c(&f, &x, &y, &cfg))] {
            if let (Some(m), Some(w)) = (v.margin, v.witness.as_ref()) {
                prop_assert_eq!(remargin(&f, cond, w, &cfg).unwrap(), Some(m));
            }
        }
    }
}

/// Larger budgets never return a less negative margin.
#[test]
fn falsify_budget_is_monotone() {
    let cfg = CheckConfig::default();
    for (name, cond) in [("sin", Condition::A), ("cubic_minus_x", Condition::B), ("sin", Condition::C)] {
        let f = lookup(name, 1).unwrap();
        let mut prev = f64::INFINITY;
        for evals in [200, 2_000, 20_000] {
            let r = falsify(&f, cond, &cfg, &SearchBudget::with_evals(evals), 4).unwrap();
            let m = r.margin.unwrap_or(f64::INFINITY);
            assert!(m <= prev, "{name}/{cond}: {m} after {prev}");
            prev = m;
        }
    }
}

/// No violation is ever reported for a catalog field at its known σ.
#[test]
fn falsify_is_sound_on_the_catalog() {
    for f in quasiconv::field::catalog() {
        let Some(sigma) = f.known_sigma() else { continue };
        let cfg = CheckConfig::with_sigma(sigma);
        for cond in [Condition::A, Condition::B, Condition::C] {
            let r = falsify(&f, cond, &cfg, &SearchBudget::with_evals(10_000), 17).unwrap();
            assert!(!r.is_violated(), "{} {cond}: {:?}", f.name(), r.margin);
            if let (Some(m), Some(w)) = (r.margin, r.witness.as_ref()) {
                let again = remargin(&f, cond, w, &cfg).unwrap().unwrap();
                assert!((again - m).abs() <= 1e-10);
            }
        }
    }
}
