//! Building moduli out of other moduli.

use super::{Modulus, Nat};

/// `⌈ln x⌉` for a natural `x`, rounded up by one unit in the last place of
/// the float logarithm so that it never under-estimates. `x <= 1` gives 0.
pub fn ceil_ln(x: Nat) -> Nat {
    if x.is_saturated() {
        return Nat::SATURATED;
    }
    if x.get() <= 1 {
        return Nat::ZERO;
    }
    // The conversion may round down for x > 2^53; step up once more.
    let xf = (x.get() as f64).next_up();
    Nat::ceil_f64(xf.ln().next_up())
}

/// `⌈p / (1 - α)⌉`, computed exactly for the float `α ∈ [0, 1)`.
///
/// The gap `1 - α` is taken as the largest float not exceeding its exact
/// value, and the quotient is corrected with fused multiply-adds so the
/// result is the true ceiling for that float gap. `α >= 1` or NaN saturates.
pub fn ceil_div_gap(p: Nat, alpha: f64) -> Nat {
    if !(alpha < 1.0) || p.is_saturated() {
        return Nat::SATURATED;
    }
    let alpha = alpha.max(0.0);
    if p == Nat::ZERO {
        return Nat::ZERO;
    }
    let mut gap = 1.0 - alpha;
    // Exact rounding error of the subtraction (|1| >= |alpha|).
    let err = (1.0 - gap) - alpha;
    if err < 0.0 {
        gap = gap.next_down();
    }
    let pf = p.get() as f64;
    if p.get() > (1u64 << 53) {
        return Nat::ceil_f64((pf.next_up() / gap).next_up());
    }
    let q = (pf / gap).ceil();
    if !q.is_finite() || q >= Nat::CEILING as f64 {
        return Nat::SATURATED;
    }
    let mut c = q;
    while c > 0.0 && (c - 1.0).mul_add(gap, -pf) >= 0.0 {
        c -= 1.0;
    }
    while c.mul_add(gap, -pf) < 0.0 {
        c += 1.0;
    }
    Nat::ceil_f64(c)
}

/// Cauchy modulus of `p a_n + q b_n` from Cauchy moduli of `a` and `b`:
/// `k ↦ max{φ1(2p(k+1)-1), φ2(2q(k+1)-1)}`, a branch being dropped when its
/// coefficient is zero.
pub fn combine_cauchy_moduli(p: u64, q: u64, phi1: &Modulus, phi2: &Modulus) -> Modulus {
    let (phi1, phi2) = (phi1.clone(), phi2.clone());
    let label = format!(
        "max{{({})(2·{p}(k+1)-1), ({})(2·{q}(k+1)-1)}}",
        phi1.label(),
        phi2.label()
    );
    Modulus::monotone(label, move |k| {
        let branch = |coef: u64, phi: &Modulus| {
            if coef == 0 {
                Nat::ZERO
            } else {
                phi.at((Nat::new(2 * coef.min(Nat::CEILING / 2)) * (Nat::new(k) + 1)).pred())
            }
        };
        branch(p, &phi1).max(branch(q, &phi2))
    })
}

/// Rate of convergence towards zero for `s_{n+1} <= (1 - a_n) s_n + c_n`,
/// given a rate of divergence `θ` of `Σ a_n`, a Cauchy modulus `χ` of
/// `Σ c_n` and a bound `L >= s_n`:
/// `Σ(k) = θ(χ(2k+1) + 1 + ⌈ln(2L(k+1))⌉) + 1`.
pub fn xu_rate(theta: &Modulus, chi: &Modulus, l: u64) -> Modulus {
    let (theta, chi) = (theta.clone(), chi.clone());
    let label = format!(
        "({})(({})(2k+1) + 1 + ⌈ln({}(k+1))⌉) + 1",
        theta.label(),
        chi.label(),
        2 * l
    );
    Modulus::monotone(label, move |k| {
        let kk = Nat::new(k);
        let log = ceil_ln(Nat::new(2) * l * (kk + 1));
        theta.at(chi.at(kk * 2 + 1) + 1 + log) + 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_ln_values() {
        assert_eq!(ceil_ln(Nat::ZERO), Nat::ZERO);
        assert_eq!(ceil_ln(Nat::ONE), Nat::ZERO);
        assert_eq!(ceil_ln(Nat::new(2)), Nat::ONE);
        assert_eq!(ceil_ln(Nat::new(4)), Nat::new(2));
        assert_eq!(ceil_ln(Nat::new(8)), Nat::new(3));
        assert_eq!(ceil_ln(Nat::new(20)), Nat::new(3));
        assert_eq!(ceil_ln(Nat::new(21)), Nat::new(4));
        assert!(ceil_ln(Nat::SATURATED).is_saturated());
        assert_eq!(ceil_ln(Nat::new(Nat::CEILING - 1)), Nat::new(44));
    }

    #[test]
    fn ceil_ln_never_underestimates() {
        for x in 2..20_000u64 {
            let c = ceil_ln(Nat::new(x)).get();
            assert!((c as f64).exp() >= x as f64, "x = {x}");
            assert!(((c - 1) as f64).exp() < x as f64 + 1.0, "x = {x} too loose");
        }
    }

    #[test]
    fn ceil_div_gap_values() {
        assert_eq!(ceil_div_gap(Nat::new(7), 0.0), Nat::new(7));
        assert_eq!(ceil_div_gap(Nat::new(7), 0.5), Nat::new(14));
        assert_eq!(ceil_div_gap(Nat::new(3), 0.75), Nat::new(12));
        assert_eq!(ceil_div_gap(Nat::ZERO, 0.3), Nat::ZERO);
        // 1 - 0.9 is slightly below 0.1 in floating point.
        assert_eq!(ceil_div_gap(Nat::ONE, 0.9), Nat::new(11));
        assert!(ceil_div_gap(Nat::ONE, 1.0).is_saturated());
        assert!(ceil_div_gap(Nat::SATURATED, 0.0).is_saturated());
    }

    #[test]
    fn ceil_div_gap_is_least_integer_bound() {
        for &alpha in &[0.0, 0.1, 0.3, 1.0 / 3.0, 0.5, 0.7, 0.9, 0.99] {
            for p in 1..500u64 {
                let c = ceil_div_gap(Nat::new(p), alpha).get() as f64;
                let gap = 1.0 - alpha;
                assert!(c * gap >= p as f64 - 1e-9, "alpha {alpha}, p {p}");
                assert!((c - 1.0) * gap < p as f64 + 1e-9, "alpha {alpha}, p {p}");
            }
        }
    }

    #[test]
    fn combine_examples() {
        let id = Modulus::identity();
        let m = combine_cauchy_moduli(1, 1, &id, &id);
        for k in 0..20 {
            assert_eq!(m.eval(k).get(), 2 * k + 1);
        }
        let phi1 = Modulus::from_fn("k+1", |k| k + 1);
        let phi2 = Modulus::from_fn("2k", |k| 2 * k);
        let m = combine_cauchy_moduli(2, 3, &phi1, &phi2);
        assert_eq!(m.eval(0).get(), 10);
        for k in 0..20 {
            assert_eq!(m.eval(k).get(), 12 * k + 10);
        }
        let m = combine_cauchy_moduli(0, 1, &Modulus::identity(), &Modulus::constant("5", 5));
        assert_eq!(m.eval(0).get(), 5);
        assert_eq!(m.eval(100).get(), 5);
        let m = combine_cauchy_moduli(0, 0, &id, &id);
        assert_eq!(m.eval(9), Nat::ZERO);
    }

    #[test]
    fn xu_rate_examples() {
        let id = Modulus::identity();
        assert_eq!(xu_rate(&id, &id, 1).eval(0).get(), 4);
        assert_eq!(xu_rate(&id, &Modulus::zero(), 1).eval(0).get(), 3);
        let s = xu_rate(&Modulus::from_fn("2n", |n| 2 * n), &id, 7);
        assert_eq!(s.first_decrease(200), None);
    }

    #[test]
    fn xu_rate_saturates_cleanly() {
        let huge = Modulus::constant("huge", Nat::CEILING - 1);
        assert!(xu_rate(&Modulus::identity(), &huge, 1).eval(0).is_saturated());
    }
}
