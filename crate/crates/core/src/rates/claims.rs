//! Hypotheses recorded in a certificate, in a form that can be re-checked
//! against a trace.

use std::fmt;

use crate::iteration::{AlphaSchedule, ErrorSchedule, IterationTrace, LambdaSchedule};
use crate::moduli::{
    check_cauchy_modulus, check_rate_of_convergence, check_rate_of_divergence, Modulus,
    RealSequenceOracle, Verdict,
};
use crate::TOL_FLOAT;

use super::{error_head, Hypothesis, RateError};

/// Largest argument at which a modulus claim is probed.
const PROBE_LIMIT: u64 = 1_000_000;

/// A sequence derived from the parameters of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqRef {
    /// `α_n`.
    Alpha,
    /// `|α_n - α_{n+1}|`.
    AlphaVariation,
    /// `|1 - λ_{n+1}/λ_n|`.
    LambdaRatio,
    /// `|1 - λ_n/λ_{n+1}|`.
    LambdaRatioStar,
    /// `|λ_n - λ_{n+1}|`.
    LambdaVariation,
    /// `‖e_n‖`.
    ErrorNorm,
}

impl SeqRef {
    fn terms(self, trace: &IterationTrace) -> Vec<f64> {
        let s = trace.schedule();
        let n = trace.horizon();
        match self {
            SeqRef::Alpha => trace.alphas().to_vec(),
            SeqRef::AlphaVariation => (0..=n).map(|i| (s.alpha_at(i) - s.alpha_at(i + 1)).abs()).collect(),
            SeqRef::LambdaRatio => (0..=n)
                .map(|i| (1.0 - s.lambda_at(i + 1) / s.lambda_at(i)).abs())
                .collect(),
            SeqRef::LambdaRatioStar => (0..=n)
                .map(|i| (1.0 - s.lambda_at(i) / s.lambda_at(i + 1)).abs())
                .collect(),
            SeqRef::LambdaVariation => (0..=n)
                .map(|i| (s.lambda_at(i) - s.lambda_at(i + 1)).abs())
                .collect(),
            SeqRef::ErrorNorm => trace.errors().iter().map(|e| e.norm()).collect(),
        }
    }
}

impl fmt::Display for SeqRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeqRef::Alpha => "alpha_n",
            SeqRef::AlphaVariation => "|alpha_n - alpha_{n+1}|",
            SeqRef::LambdaRatio => "|1 - lambda_{n+1}/lambda_n|",
            SeqRef::LambdaRatioStar => "|1 - lambda_n/lambda_{n+1}|",
            SeqRef::LambdaVariation => "|lambda_n - lambda_{n+1}|",
            SeqRef::ErrorNorm => "|e_n|",
        })
    }
}

/// What is added to `max{‖x0 - z‖, ‖f(z) - z‖/(1-α)}` in an anchor bound.
#[derive(Debug, Clone)]
pub enum Allowance {
    None,
    Fixed(u64),
    /// `⌈Σ_{i<=θ1(0)} ‖e_i‖⌉ + 1`.
    ErrorHead(Modulus),
}

impl fmt::Display for Allowance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Allowance::None => Ok(()),
            Allowance::Fixed(v) => write!(f, " + {v}"),
            Allowance::ErrorHead(t) => write!(f, " + ⌈Σ_(i<=θ1(0)) |e_i|⌉ + 1 with θ1 = {}", t.label()),
        }
    }
}

/// The closed-form linear-rate families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearFamily {
    /// `α_n = 2/((1-α)(n+J))`, constant `λ`, no errors.
    First { alpha: f64 },
    /// `α_n` as above, `λ_n = (n+J)/(n+J-1)`, `e_n = e*/(n+J)^2`, `‖e*‖ <= e_star_norm`.
    Second { alpha: f64, e_star_norm: f64 },
}

#[derive(Debug, Clone)]
pub enum Claim {
    /// `modulus` is a rate of divergence of `Σ seq`.
    Divergence { seq: SeqRef, modulus: Modulus },
    /// `modulus` is a Cauchy modulus of `Σ seq`.
    SeriesCauchy { seq: SeqRef, modulus: Modulus },
    /// `modulus` is a rate of convergence of `seq` to 0.
    Vanishing { seq: SeqRef, modulus: Modulus },
    /// `λ_n >= 1/lambda` for `n >= from`.
    LambdaLowerBound { lambda: u64, from: u64 },
    /// `bound >= λ_m`.
    LambdaAtM { m: u64, bound: u64 },
    /// `Σ ‖e_n‖ <= bound`.
    ErrorSumBound { bound: u64 },
    /// `kz >= max{‖x0 - z‖, ‖f(z) - z‖/(1-α)} + allowance` for the known zero `z`.
    AnchorBound { kz: u64, allowance: Allowance },
    ErrorFree,
    /// The map's declared constant is at most `alpha`.
    ContractionConstant { alpha: f64 },
    Linear(LinearFamily),
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Divergence { seq, modulus } => {
                write!(f, "{} is a rate of divergence of Σ {seq}", modulus.label())
            }
            Claim::SeriesCauchy { seq, modulus } => {
                write!(f, "{} is a Cauchy modulus of Σ {seq}", modulus.label())
            }
            Claim::Vanishing { seq, modulus } => {
                write!(f, "{} is a rate of convergence of {seq} to 0", modulus.label())
            }
            Claim::LambdaLowerBound { lambda, from } => {
                write!(f, "lambda_n >= 1/{lambda} for n >= {from}")
            }
            Claim::LambdaAtM { m, bound } => write!(f, "lambda_{m} <= {bound}"),
            Claim::ErrorSumBound { bound } => write!(f, "Σ |e_n| <= {bound}"),
            Claim::AnchorBound { kz, allowance } => {
                write!(f, "K = {kz} >= max{{|x0 - z|, |f(z) - z|/(1-alpha)}}{allowance}")
            }
            Claim::ErrorFree => f.write_str("e_n = 0"),
            Claim::ContractionConstant { alpha } => write!(f, "f is a {alpha}-contraction"),
            Claim::Linear(LinearFamily::First { alpha }) => write!(
                f,
                "alpha_n = 2/((1-{alpha})(n+J)), lambda_n constant, e_n = 0"
            ),
            Claim::Linear(LinearFamily::Second { alpha, e_star_norm }) => write!(
                f,
                "alpha_n = 2/((1-{alpha})(n+J)), lambda_n = (n+J)/(n+J-1), e_n = e*/(n+J)^2 with |e*| <= {e_star_norm}"
            ),
        }
    }
}

/// A hypothesis tag together with the checkable claim behind it.
#[derive(Debug, Clone)]
pub struct Precondition {
    pub tag: Hypothesis,
    pub claim: Claim,
}

impl Precondition {
    pub fn new(tag: Hypothesis, claim: Claim) -> Self {
        Precondition { tag, claim }
    }

    /// Checks the claim on the prefix recorded in `trace`. Claims about
    /// moduli are probed at every argument whose value fits in the horizon.
    pub fn check(&self, trace: &IterationTrace) -> Result<(), RateError> {
        let fail = |detail: String| {
            Err(RateError::Precondition {
                tag: self.tag,
                detail,
            })
        };
        let horizon = trace.horizon();
        let verdict = match &self.claim {
            Claim::Divergence { seq, modulus } => {
                let Some(n_max) = last_in_horizon(modulus, horizon) else {
                    return Ok(());
                };
                let oracle = RealSequenceOracle::from_vec(seq.to_string(), seq.terms(trace));
                check_rate_of_divergence(modulus, &oracle, n_max)?
            }
            Claim::SeriesCauchy { seq, modulus } => {
                let Some(k_max) = last_in_horizon(modulus, horizon) else {
                    return Ok(());
                };
                let sums = RealSequenceOracle::from_vec(seq.to_string(), seq.terms(trace)).partial_sums(horizon)?;
                check_cauchy_modulus(modulus, &sums, k_max, horizon)?
            }
            Claim::Vanishing { seq, modulus } => {
                let Some(k_max) = last_in_horizon(modulus, horizon) else {
                    return Ok(());
                };
                let oracle = RealSequenceOracle::from_vec(seq.to_string(), seq.terms(trace));
                check_rate_of_convergence(modulus, &oracle, 0.0, k_max, horizon)?
            }
            Claim::LambdaLowerBound { lambda, from } => {
                let floor = 1.0 / *lambda as f64;
                let l = trace.lambdas();
                for (n, &ln) in l.iter().enumerate().skip(*from as usize) {
                    if !(ln * *lambda as f64 >= 1.0 - TOL_FLOAT) {
                        return fail(format!("lambda_{n} = {ln} < 1/{lambda} = {floor}"));
                    }
                }
                return Ok(());
            }
            Claim::LambdaAtM { m, bound } => {
                let l = trace.schedule().lambda_at(*m);
                if !(l <= *bound as f64) {
                    return fail(format!("lambda_{m} = {l} exceeds {bound}"));
                }
                return Ok(());
            }
            Claim::ErrorSumBound { bound } => {
                let total: f64 = trace.errors().iter().map(|e| e.norm()).sum();
                if !(total <= *bound as f64 + TOL_FLOAT) {
                    return fail(format!("Σ_(n<={horizon}) |e_n| = {total} exceeds {bound}"));
                }
                return Ok(());
            }
            Claim::AnchorBound { kz, allowance } => {
                let Some(z) = trace.operator().known_zero() else {
                    return fail("the operator has no known zero".into());
                };
                let f = trace.contraction();
                let x0 = &trace.points()[0];
                let base = x0.dist(z).max(f.apply(z)?.dist(z) / (1.0 - f.alpha()));
                let extra = match allowance {
                    Allowance::None => 0.0,
                    Allowance::Fixed(v) => *v as f64,
                    Allowance::ErrorHead(theta1) => {
                        let s = trace.schedule();
                        let dim = trace.dim();
                        error_head(theta1, |n| s.error_at(n, dim))? as f64 + 1.0
                    }
                };
                let need = base + extra;
                if !(need <= *kz as f64 + TOL_FLOAT) {
                    return fail(format!("K = {kz} is below the required {need}"));
                }
                return Ok(());
            }
            Claim::ErrorFree => {
                if let Some((n, e)) = trace.errors().iter().enumerate().find(|(_, e)| e.norm() != 0.0) {
                    return fail(format!("e_{n} has norm {}", e.norm()));
                }
                return Ok(());
            }
            Claim::ContractionConstant { alpha } => {
                let declared = trace.contraction().alpha();
                if !(declared <= *alpha) {
                    return fail(format!("declared constant {declared} exceeds {alpha}"));
                }
                return Ok(());
            }
            Claim::Linear(family) => return check_linear(*family, trace).or_else(fail),
        };
        match verdict {
            Verdict::Verified { .. } => Ok(()),
            Verdict::Refuted(w) => fail(format!(
                "{} refuted at k={:?}, n={}: observed {} against {}",
                self.claim, w.k, w.n, w.observed, w.bound
            )),
        }
    }
}

/// Largest `k <= PROBE_LIMIT` with `modulus(k) <= horizon`, by bisection on
/// the monotone modulus.
fn last_in_horizon(modulus: &Modulus, horizon: u64) -> Option<u64> {
    let fits = |k: u64| modulus.eval(k).get() <= horizon;
    if !fits(0) {
        return None;
    }
    let (mut lo, mut hi) = (0u64, PROBE_LIMIT);
    if fits(hi) {
        return Some(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn check_linear(family: LinearFamily, trace: &IterationTrace) -> Result<(), String> {
    let s = trace.schedule();
    let alpha = match family {
        LinearFamily::First { alpha } | LinearFamily::Second { alpha, .. } => alpha,
    };
    let AlphaSchedule::LinearExample { alpha: a, j } = s.alpha else {
        return Err("alpha_n is not of the form 2/((1-alpha)(n+J))".into());
    };
    if a != alpha {
        return Err(format!("schedule built for alpha = {a}, certificate for {alpha}"));
    }
    for (n, &v) in trace.alphas().iter().enumerate() {
        let want = 2.0 / ((1.0 - alpha) * (n as f64 + j as f64));
        if !close(v, want) {
            return Err(format!("alpha_{n} = {v}, expected {want}"));
        }
    }
    let l = trace.lambdas();
    match family {
        LinearFamily::First { .. } => {
            if !matches!(s.lambda, LambdaSchedule::Constant(_)) || l.iter().any(|&v| v != l[0]) {
                return Err("lambda_n is not constant".into());
            }
            if let Some((n, _)) = trace.errors().iter().enumerate().find(|(_, e)| e.norm() != 0.0) {
                return Err(format!("e_{n} is nonzero"));
            }
        }
        LinearFamily::Second { e_star_norm, .. } => {
            if s.lambda != (LambdaSchedule::LinearExample { j }) {
                return Err("lambda_n is not (n+J)/(n+J-1)".into());
            }
            let ErrorSchedule::InverseSquare { e_star, j: je } = &s.error else {
                return Err("e_n is not of the form e*/(n+J)^2".into());
            };
            if *je != j {
                return Err(format!("error offset {je} differs from J = {j}"));
            }
            if !(e_star.norm() <= e_star_norm + TOL_FLOAT) {
                return Err(format!("|e*| = {} exceeds {e_star_norm}", e_star.norm()));
            }
            for (n, &v) in l.iter().enumerate() {
                let want = (n as f64 + j as f64) / (n as f64 + j as f64 - 1.0);
                if !close(v, want) {
                    return Err(format!("lambda_{n} = {v}, expected {want}"));
                }
            }
            for (n, e) in trace.errors().iter().enumerate() {
                let d = (n as f64 + j as f64).powi(2);
                if e.coords().iter().zip(e_star.coords()).any(|(x, y)| !close(x * d, *y)) {
                    return Err(format!("e_{n} is not e*/(n+J)^2"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_last_fitting_argument() {
        assert_eq!(last_in_horizon(&Modulus::identity(), 100), Some(100));
        let m = Modulus::from_table("t", vec![5.into(), 5.into(), 9.into()], 50.into());
        assert_eq!(last_in_horizon(&m, 4), None);
        assert_eq!(last_in_horizon(&m, 8), Some(1));
        assert_eq!(last_in_horizon(&Modulus::zero(), 0), Some(PROBE_LIMIT));
    }
}
