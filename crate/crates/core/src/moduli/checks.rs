//! Horizon-bounded checkers for the three notions a modulus can witness,
//! and for the two recurrence lemmas on nonnegative real sequences.

use super::{Modulus, ModuliError, Nat, RealSequenceOracle, Verdict, Witness};
use crate::TOL_FLOAT;

/// Largest index a checker will sum up to on an unbounded oracle.
const SCAN_LIMIT: u64 = 1 << 28;

fn index_of(theta: &Modulus, n: u64, seq: &RealSequenceOracle) -> Result<u64, ModuliError> {
    let idx = theta.eval(n);
    let limit = seq.horizon().unwrap_or(SCAN_LIMIT);
    if idx.is_saturated() || idx.get() > limit {
        return Err(ModuliError::HorizonExceeded {
            sequence: seq.description().to_string(),
            index: idx.get(),
            horizon: limit,
        });
    }
    Ok(idx.get())
}

/// Checks `Σ_{i<=θ(n)} b_i >= n` for every `n <= n_max`.
pub fn check_rate_of_divergence(
    theta: &Modulus,
    b: &RealSequenceOracle,
    n_max: u64,
) -> Result<Verdict, ModuliError> {
    let mut sum = 0.0;
    let mut summed: u64 = 0;
    for n in 0..=n_max {
        let idx = index_of(theta, n, b)?;
        while summed <= idx {
            let t = b.term(summed)?;
            if !(t >= 0.0) {
                return Err(ModuliError::NegativeTerm {
                    sequence: b.description().to_string(),
                    index: summed,
                    value: t,
                });
            }
            sum += t;
            summed += 1;
        }
        let target = n as f64;
        if sum + TOL_FLOAT < target {
            return Ok(Verdict::Refuted(Witness {
                k: None,
                n,
                observed: sum,
                bound: target,
            }));
        }
    }
    Ok(Verdict::Verified { up_to: n_max })
}

/// Suffix extrema of a finite slice: `(max, argmax, min, argmin)` over `i..`.
struct SuffixExtrema {
    max: Vec<(f64, usize)>,
    min: Vec<(f64, usize)>,
}

impl SuffixExtrema {
    fn new(values: &[f64]) -> Self {
        let len = values.len();
        let mut max = vec![(f64::NEG_INFINITY, 0); len];
        let mut min = vec![(f64::INFINITY, 0); len];
        for i in (0..len).rev() {
            let v = values[i];
            max[i] = if i + 1 < len && max[i + 1].0 >= v {
                max[i + 1]
            } else {
                (v, i)
            };
            min[i] = if i + 1 < len && min[i + 1].0 <= v {
                min[i + 1]
            } else {
                (v, i)
            };
        }
        SuffixExtrema { max, min }
    }
}

/// Checks that `phi` is a Cauchy modulus of `a` on `0..=n_max`:
/// `|a(n+p) - a(n)| <= 1/(k+1)` whenever `phi(k) <= n <= n+p <= n_max`.
///
/// The condition for a fixed `k` is equivalent to the oscillation of `a`
/// over `[phi(k), n_max]` being at most `1/(k+1)`, which is what is
/// evaluated.
pub fn check_cauchy_modulus(
    phi: &Modulus,
    a: &RealSequenceOracle,
    k_max: u64,
    n_max: u64,
) -> Result<Verdict, ModuliError> {
    let values = a.prefix(n_max)?;
    let ext = SuffixExtrema::new(&values);
    for k in 0..=k_max {
        let Some(start) = phi.eval(k).as_index().filter(|&s| s < values.len()) else {
            continue;
        };
        let (hi, hi_at) = ext.max[start];
        let (lo, lo_at) = ext.min[start];
        let bound = 1.0 / (k as f64 + 1.0);
        let osc = hi - lo;
        if !(osc <= bound + TOL_FLOAT) {
            return Ok(Verdict::Refuted(Witness {
                k: Some(k),
                n: hi_at.min(lo_at) as u64,
                observed: osc,
                bound,
            }));
        }
    }
    Ok(Verdict::Verified { up_to: n_max })
}

/// Checks `|a(n) - limit| <= 1/(k+1)` for all `k <= k_max` and
/// `phi(k) <= n <= n_max`.
pub fn check_rate_of_convergence(
    phi: &Modulus,
    a: &RealSequenceOracle,
    limit: f64,
    k_max: u64,
    n_max: u64,
) -> Result<Verdict, ModuliError> {
    let dev: Vec<f64> = a
        .prefix(n_max)?
        .into_iter()
        .map(|v| (v - limit).abs())
        .collect();
    let ext = SuffixExtrema::new(&dev);
    for k in 0..=k_max {
        let Some(start) = phi.eval(k).as_index().filter(|&s| s < dev.len()) else {
            continue;
        };
        let (worst, at) = ext.max[start];
        let bound = 1.0 / (k as f64 + 1.0);
        if !(worst <= bound + TOL_FLOAT) {
            return Ok(Verdict::Refuted(Witness {
                k: Some(k),
                n: at as u64,
                observed: worst,
                bound,
            }));
        }
    }
    Ok(Verdict::Verified { up_to: n_max })
}

/// A rate of divergence of a series with terms in `[0, 1]` is at least
/// `n - 2` at every `n`; this checks that floor.
pub fn divergence_floor_check(theta: &Modulus, n_max: u64) -> Verdict {
    for n in 0..=n_max {
        let got = theta.eval(n);
        let floor = Nat::new(n) - 2;
        if got < floor {
            return Verdict::Refuted(Witness {
                k: None,
                n,
                observed: got.to_f64(),
                bound: floor.to_f64(),
            });
        }
    }
    Verdict::Verified { up_to: n_max }
}

fn violation(hypothesis: &str, index: u64, detail: String) -> ModuliError {
    ModuliError::PreconditionViolation {
        hypothesis: hypothesis.to_string(),
        index,
        detail,
    }
}

/// Checks that `sigma` is a rate of convergence of `s` towards zero, after
/// re-checking on `0..=n_max` the hypotheses under which such a rate is
/// derived from `s_{n+1} <= (1 - a_n) s_n + c_n`: `a_n ∈ [0,1]`, `s_n, c_n >= 0`
/// and `s_n <= L`.
pub fn check_xu_recurrence_bound(
    s: &RealSequenceOracle,
    a: &RealSequenceOracle,
    c: &RealSequenceOracle,
    bound: u64,
    sigma: &Modulus,
    k_max: u64,
    n_max: u64,
) -> Result<Verdict, ModuliError> {
    if bound == 0 {
        return Err(ModuliError::Domain("upper bound L must be positive".into()));
    }
    let sv = s.prefix(n_max)?;
    let av = a.prefix(n_max)?;
    let cv = c.prefix(n_max)?;
    let l = bound as f64;
    for n in 0..=n_max as usize {
        let i = n as u64;
        if !(0.0..=1.0).contains(&av[n]) {
            return Err(violation("a_n in [0,1]", i, format!("a_n = {}", av[n])));
        }
        if !(sv[n] >= 0.0) {
            return Err(violation("s_n >= 0", i, format!("s_n = {}", sv[n])));
        }
        if !(cv[n] >= 0.0) {
            return Err(violation("c_n >= 0", i, format!("c_n = {}", cv[n])));
        }
        if !(sv[n] <= l + TOL_FLOAT) {
            return Err(violation("s_n <= L", i, format!("s_n = {} > L = {l}", sv[n])));
        }
        if n + 1 < sv.len() {
            let rhs = (1.0 - av[n]) * sv[n] + cv[n];
            if !(sv[n + 1] <= rhs + TOL_FLOAT) {
                return Err(violation(
                    "s_{n+1} <= (1 - a_n) s_n + c_n",
                    i,
                    format!("s_(n+1) = {} > {rhs}", sv[n + 1]),
                ));
            }
        }
    }
    check_rate_of_convergence(sigma, s, 0.0, k_max, n_max)
}

fn check_sabach_shtern_domain(l: f64, n_coef: u64, j: u64, gamma: f64) -> Result<(), ModuliError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(ModuliError::Domain(format!("gamma = {gamma} must lie in (0, 1]")));
    }
    if n_coef < 2 || j < n_coef {
        return Err(ModuliError::Domain(format!(
            "need J >= N >= 2, got J = {j}, N = {n_coef}"
        )));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(ModuliError::Domain(format!("L = {l} must be positive")));
    }
    Ok(())
}

/// The bound `J L / (γ (n + J))` on sequences obeying
/// `s_{n+1} <= (1 - γ a_{n+1}) s_n + (a_n - a_{n+1}) c_n` with
/// `a_n = N / (γ (n + J))`.
pub fn sabach_shtern_bound(l: f64, j: u64, n: u64, gamma: f64) -> Result<f64, ModuliError> {
    check_sabach_shtern_domain(l, 2, j, gamma)?;
    Ok(j as f64 * l / (gamma * (n as f64 + j as f64)))
}

/// Re-checks the hypotheses of the `J L / (γ (n + J))` bound on `0..=n_max`
/// and then the bound itself.
///
/// A failed hypothesis is reported as [`ModuliError::PreconditionViolation`];
/// a sequence that meets every hypothesis yet exceeds the bound yields a
/// refuting [`Verdict`].
pub fn check_sabach_shtern(
    s: &RealSequenceOracle,
    c: &RealSequenceOracle,
    l: f64,
    n_coef: u64,
    j: u64,
    gamma: f64,
    n_max: u64,
) -> Result<Verdict, ModuliError> {
    check_sabach_shtern_domain(l, n_coef, j, gamma)?;
    let sv = s.prefix(n_max)?;
    let cv = c.prefix(n_max)?;
    let a = |n: usize| n_coef as f64 / (gamma * (n as f64 + j as f64));
    if !(sv[0] <= l + TOL_FLOAT) {
        return Err(violation("s_0 <= L", 0, format!("s_0 = {} > L = {l}", sv[0])));
    }
    for n in 0..sv.len() {
        let i = n as u64;
        if !(cv[n] <= l + TOL_FLOAT) {
            return Err(violation("c_n <= L", i, format!("c_n = {} > L = {l}", cv[n])));
        }
        if !(sv[n] >= 0.0) {
            return Err(violation("s_n >= 0", i, format!("s_n = {}", sv[n])));
        }
        if n + 1 < sv.len() {
            let rhs = (1.0 - gamma * a(n + 1)) * sv[n] + (a(n) - a(n + 1)) * cv[n];
            if !(sv[n + 1] <= rhs + TOL_FLOAT) {
                return Err(violation(
                    "s_{n+1} <= (1 - γ a_{n+1}) s_n + (a_n - a_{n+1}) c_n",
                    i,
                    format!("s_(n+1) = {} > {rhs}", sv[n + 1]),
                ));
            }
        }
    }
    for (n, &v) in sv.iter().enumerate() {
        let bound = sabach_shtern_bound(l, j, n as u64, gamma)?;
        if !(v <= bound + TOL_FLOAT) {
            return Ok(Verdict::Refuted(Witness {
                k: None,
                n: n as u64,
                observed: v,
                bound,
            }));
        }
    }
    Ok(Verdict::Verified { up_to: n_max })
}
