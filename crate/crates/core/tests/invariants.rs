//! Property tests for invariants that hold for every input.

mod common;

use proptest::prelude::*;

use common::{operator, OpKind, OPS};
use vamrate_core::iteration::{check_bound_lemma, run_vame, ParamSchedule};
use vamrate_core::moduli::{
    brute_cauchy_modulus, brute_divergence_rate, brute_rate_of_convergence, check_cauchy_modulus,
    check_rate_of_convergence, check_rate_of_divergence, xu_rate, Modulus, Nat, RealSequenceOracle,
};
use vamrate_core::operators::{check_resolvent_identity, ContractionMap, Point};
use vamrate_core::rates::{kz_bound, linear_rates_example1, linear_rates_example2, KzMode};
use vamrate_core::verify::{certify_unchecked, empirical_rate, RowStatus};

fn point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-5.0..5.0f64, dim).prop_map(|v| Point::new(v).unwrap())
}

fn op_kind() -> impl Strategy<Value = OpKind> {
    prop::sample::select(OPS.to_vec())
}

/// `⌈1/(1-α)⌉` for the float `α` taken at its exact binary value. Every
/// `α >= 2^-7` is an integer multiple of `2^-60`.
fn gap_ceil(alpha: f64) -> u128 {
    let scale = 2f64.powi(60);
    let a = (alpha * scale) as u128;
    assert_eq!(a as f64, alpha * scale);
    let one = 1u128 << 60;
    one.div_ceil(one - a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nat_arithmetic_matches_u128(a in 0u64..1 << 40, b in 0u64..1 << 40) {
        let (x, y) = (Nat::new(a), Nat::new(b));
        prop_assert_eq!((x + y).get() as u128, a as u128 + b as u128);
        let prod = a as u128 * b as u128;
        let expected = prod.min(Nat::CEILING as u128) as u64;
        prop_assert_eq!((x * y).get(), expected);
        prop_assert_eq!((x - y).get(), a.saturating_sub(b));
    }

    #[test]
    fn saturation_is_absorbing(a in 0u64..u64::MAX) {
        let s = Nat::SATURATED;
        prop_assert!((s + Nat::new(a)).is_saturated());
        prop_assert!((s - Nat::new(a)).is_saturated());
        if a > 0 {
            prop_assert!((s * Nat::new(a)).is_saturated());
        }
    }

    #[test]
    fn ceil_is_least_upper_natural(x in 0.0..1e12f64) {
        let c = Nat::ceil_f64(x).get();
        prop_assert!(c as f64 >= x);
        prop_assert!(c == 0 || ((c - 1) as f64) < x);
    }

    #[test]
    fn resolvent_fixes_the_known_zero(kind in op_kind(), dim in 1usize..12, seed in 0u64..100, gamma in 1e-3..1e3f64) {
        let op = operator(kind, dim, seed);
        let z = op.known_zero().unwrap().clone();
        prop_assert!(op.resolvent(gamma, &z).unwrap().dist(&z) <= 1e-9);
    }

    #[test]
    fn resolvent_identity_on_random_points(kind in op_kind(), seed in 0u64..100, x in point(6),
                                           lambda in 1e-3..1e3f64, gamma in 1e-3..1e3f64) {
        let op = operator(kind, 6, seed);
        prop_assert!(check_resolvent_identity(&op, lambda, gamma, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn brute_moduli_satisfy_their_definitions(values in prop::collection::vec(-1.0..1.0f64, 1..300)) {
        let n_max = values.len() as u64 - 1;
        let a = RealSequenceOracle::from_vec("a", values.clone());
        let cauchy = brute_cauchy_modulus("a", &values);
        prop_assert!(check_cauchy_modulus(&cauchy, &a, 50, n_max).unwrap().holds());
        let rate = brute_rate_of_convergence("a", &values, 0.0);
        prop_assert!(check_rate_of_convergence(&rate, &a, 0.0, 50, n_max).unwrap().holds());
        // Least: one index earlier fails whenever the modulus is positive.
        for k in 0..20 {
            let m = cauchy.eval(k).get();
            if m > 0 && m <= n_max {
                let earlier = Modulus::constant("earlier", m - 1);
                prop_assert!(!check_cauchy_modulus(&earlier, &a, k, n_max).unwrap().holds());
            }
        }
    }

    #[test]
    fn brute_divergence_rate_reaches_each_level(terms in prop::collection::vec(0.0..1.0f64, 1..300)) {
        let theta = brute_divergence_rate("b", &terms);
        let total: f64 = terms.iter().sum();
        let reach = total.floor() as u64;
        let b = RealSequenceOracle::from_vec("b", terms);
        prop_assert!(check_rate_of_divergence(&theta, &b, reach).unwrap().holds());
        prop_assert!(theta.eval(reach + 2).is_saturated());
    }

    #[test]
    fn xu_rate_is_monotone_in_the_bound(l in 1u64..1000, k in 0u64..50) {
        let theta = Modulus::from_fn("2n", |n| 2 * n);
        let chi = Modulus::from_fn("k", |k| k);
        prop_assert!(xu_rate(&theta, &chi, l).eval(k) <= xu_rate(&theta, &chi, l + 1).eval(k));
        prop_assert!(xu_rate(&theta, &chi, l).eval(k) <= xu_rate(&theta, &chi, l).eval(k + 1));
    }

    #[test]
    fn first_linear_rates_match_exact_oracle(kz in 1u64..10_000, p in 0u32..99, k in 0u64..10_000) {
        let alpha = p as f64 / 100.0;
        let c = gap_ceil(alpha);
        let (phi, psi) = linear_rates_example1(kz, alpha).unwrap();
        let kk = k as u128 + 1;
        let kz = kz as u128;
        prop_assert_eq!(phi.modulus.eval(k).get() as u128, 4 * kz * c * c * kk - 2 * c);
        prop_assert_eq!(psi.modulus.eval(k).get() as u128, (4 * kz * c * c + 4 * kz * c) * kk - 2 * c);
    }

    #[test]
    fn second_linear_rates_match_exact_oracle(kz in 1u64..10_000, p in 0u32..99, e in 0.0..50.0f64, k in 0u64..10_000) {
        let alpha = p as f64 / 100.0;
        let c = gap_ceil(alpha);
        let j = 2 * c;
        let eps = e.ceil() as u128;
        let (phi, psi, theta, _) = linear_rates_example2(kz, alpha, e).unwrap();
        let kk = k as u128 + 1;
        let kz = kz as u128;
        prop_assert_eq!(phi.modulus.eval(k).get() as u128, (3 * j * kz + eps) * c * kk - j);
        prop_assert_eq!(psi.modulus.eval(k).get() as u128, 18 * kz * c * c * kk + 3 * eps * c * kk - 2 * c);
        prop_assert_eq!(theta.modulus.eval(k).get() as u128, 36 * kz * c * c * kk + 6 * eps * c * kk - 2 * c);
    }

    #[test]
    fn kz_bound_dominates_its_inputs(x0 in point(3), z in point(3), u in point(3)) {
        let f = ContractionMap::constant(u.clone()).unwrap();
        let k = kz_bound(&x0, &z, &f, 0, KzMode::Vam).unwrap() as f64;
        prop_assert!(k >= 1.0);
        prop_assert!(k >= x0.dist(&z) && k >= u.dist(&z));
        prop_assert!(k - 1.0 < x0.dist(&z).max(u.dist(&z)).max(0.0) || k == 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certify_agrees_with_empirical_index(kind in op_kind(), seed in 0u64..50, x0 in point(3), p in 0u32..9) {
        let alpha = p as f64 / 10.0;
        let op = operator(kind, 3, seed);
        let z = op.known_zero().unwrap().clone();
        let f = ContractionMap::affine_random(alpha, Point::zeros(3), seed).unwrap();
        let sched = ParamSchedule::example1(alpha, 1.0).unwrap();
        let trace = run_vame(&x0, &op, &f, &sched, 2_000).unwrap();
        prop_assert!(check_bound_lemma(&trace, &z, &[0]).unwrap().holds());
        let kz = kz_bound(&x0, &z, &f, 0, KzMode::Vam).unwrap();
        let (phi, _) = linear_rates_example1(kz, alpha).unwrap();
        let r = certify_unchecked(&trace, &phi, 10).unwrap();
        for row in &r.rows {
            let emp = empirical_rate(&trace, phi.residual_kind, row.k).unwrap();
            prop_assert_eq!(emp, row.empirical);
            match row.status {
                RowStatus::Pass => prop_assert!(emp.is_some_and(|e| e <= row.certified.get())),
                RowStatus::Fail => prop_assert!(emp.is_none_or(|e| e > row.certified.get())),
                RowStatus::HorizonSkipped => prop_assert!(row.certified.get() > r.horizon),
            }
        }
        // A shrunken modulus never certifies a later index.
        let shrunk = phi.shrunk(5);
        for k in 0..10 {
            prop_assert!(shrunk.modulus.eval(k) <= phi.modulus.eval(k));
        }
    }
}
