//! Least moduli read off a finite prefix of a sequence.
//!
//! These are the smallest indices satisfying each definition on the given
//! window only, so any conclusion drawn from them is conditional on that
//! window. Labels carry a `[horizon H]` suffix to keep that visible.

use std::sync::Arc;

use super::{Modulus, Nat};

fn suffix_fold(values: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = values.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = f(out[i], out[i + 1]);
    }
    out
}

/// The least `n0` per `k` such that `|a(n) - a(m)| <= 1/(k+1)` for all
/// `n0 <= n <= m < values.len()`.
pub fn brute_cauchy_modulus(label: impl Into<String>, values: &[f64]) -> Modulus {
    let hi = suffix_fold(values, f64::max);
    let lo = suffix_fold(values, f64::min);
    let osc: Arc<[f64]> = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
    threshold_modulus(label.into(), osc)
}

/// The least `n0` per `k` such that `|a(n) - limit| <= 1/(k+1)` for all
/// `n0 <= n < values.len()`.
pub fn brute_rate_of_convergence(label: impl Into<String>, values: &[f64], limit: f64) -> Modulus {
    let dev: Vec<f64> = values.iter().map(|v| (v - limit).abs()).collect();
    let worst: Arc<[f64]> = suffix_fold(&dev, f64::max).into();
    threshold_modulus(label.into(), worst)
}

/// `tail` is nonincreasing; the modulus is the first index where it drops
/// to `1/(k+1)`.
fn threshold_modulus(label: String, tail: Arc<[f64]>) -> Modulus {
    let horizon = tail.len().saturating_sub(1);
    Modulus::monotone(format!("{label} [horizon {horizon}]"), move |k| {
        let bound = 1.0 / (k as f64 + 1.0);
        Nat::new(tail.partition_point(|&t| !(t <= bound)) as u64)
    })
}

/// The least `m` with `Σ_{i<=m} b_i >= n`, for every `n` the window reaches;
/// saturated past the total of the window.
pub fn brute_divergence_rate(label: impl Into<String>, terms: &[f64]) -> Modulus {
    let mut table = Vec::new();
    let mut sum = 0.0;
    let mut n = 0u64;
    for (m, &t) in terms.iter().enumerate() {
        sum += t.max(0.0);
        while sum >= n as f64 {
            table.push(Nat::new(m as u64));
            n += 1;
        }
    }
    let label = format!("{} [horizon {}]", label.into(), terms.len().saturating_sub(1));
    Modulus::from_table(label, table, Nat::SATURATED)
}
