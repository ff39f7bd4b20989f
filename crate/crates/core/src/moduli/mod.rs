//! Moduli of convergence and the checkers that corroborate them.
//!
//! A [`Modulus`] is a nondecreasing map from naturals to naturals. The same
//! type carries Cauchy moduli, rates of convergence, rates of divergence and
//! rates of asymptotic regularity; what a modulus *means* is decided by the
//! checker it is handed to. Checkers only ever look at a finite window of the
//! sequence, so a positive answer reads "verified up to `n_max`".

mod brute;
mod checks;
mod combinators;
mod nat;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use brute::{brute_cauchy_modulus, brute_divergence_rate, brute_rate_of_convergence};
pub use checks::{
    check_cauchy_modulus, check_rate_of_convergence, check_rate_of_divergence,
    check_sabach_shtern, check_xu_recurrence_bound, divergence_floor_check, sabach_shtern_bound,
};
pub use combinators::{ceil_div_gap, ceil_ln, combine_cauchy_moduli, xu_rate};
pub use nat::Nat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error("index {index} lies beyond the valid range of `{sequence}` (horizon {horizon})")]
    HorizonExceeded {
        sequence: String,
        index: u64,
        horizon: u64,
    },
    #[error("`{sequence}` has negative term {value} at index {index}")]
    NegativeTerm {
        sequence: String,
        index: u64,
        value: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition `{hypothesis}` fails at index {index}: {detail}")]
    PreconditionViolation {
        hypothesis: String,
        index: u64,
        detail: String,
    },
}

/// The point where a checked property first failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Accuracy index `k` of the failing bound, when the property has one.
    pub k: Option<u64>,
    pub n: u64,
    pub observed: f64,
    pub bound: f64,
}

/// Outcome of a horizon-bounded check.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Verified { up_to: u64 },
    Refuted(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Refuted(w) => Some(w),
            Verdict::Verified { .. } => None,
        }
    }
}

type ModulusFn = dyn Fn(u64) -> Nat + Send + Sync;

/// A nondecreasing map `N -> N`.
///
/// Constructors normalize their input to be monotone, so every value of this
/// type satisfies `k1 <= k2 => eval(k1) <= eval(k2)`. Enlarging a modulus
/// pointwise never invalidates it, which is why the normalization is a
/// running maximum.
#[derive(Clone)]
pub struct Modulus {
    eval: Arc<ModulusFn>,
    label: Arc<str>,
}

impl Modulus {
    /// Wraps an arbitrary function, normalized by a running maximum.
    ///
    /// Evaluation at `k` scans `0..=k`, so this is meant for small arguments
    /// (tests, hand-written moduli). Tables and closed forms have cheaper
    /// constructors.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Modulus
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        Modulus::from_nat_fn(label, move |k| Nat::new(f(k)))
    }

    /// As [`Modulus::from_fn`], for functions already producing [`Nat`]s.
    pub fn from_nat_fn<F>(label: impl Into<String>, f: F) -> Modulus
    where
        F: Fn(u64) -> Nat + Send + Sync + 'static,
    {
        Modulus::monotone(label, move |k| {
            let mut best = Nat::ZERO;
            for j in 0..=k {
                best = best.max(f(j));
                if best.is_saturated() {
                    break;
                }
            }
            best
        })
    }

    /// A modulus given by its first values; `beyond` is used past the end
    /// of the table. Normalized by prefix maximum.
    pub fn from_table(label: impl Into<String>, values: Vec<Nat>, beyond: Nat) -> Modulus {
        let mut running = Nat::ZERO;
        let table: Vec<Nat> = values
            .into_iter()
            .map(|v| {
                running = running.max(v);
                running
            })
            .collect();
        let beyond = beyond.max(running);
        Modulus::monotone(label, move |k| {
            usize::try_from(k)
                .ok()
                .and_then(|i| table.get(i).copied())
                .unwrap_or(beyond)
        })
    }

    pub fn constant(label: impl Into<String>, value: u64) -> Modulus {
        let v = Nat::new(value);
        Modulus::monotone(label, move |_| v)
    }

    pub fn zero() -> Modulus {
        Modulus::constant("0", 0)
    }

    /// `k ↦ k`.
    pub fn identity() -> Modulus {
        Modulus::monotone("k", Nat::new)
    }

    /// Trusted constructor: the caller guarantees `f` is nondecreasing.
    /// Used for closed forms and for compositions of monotone moduli.
    pub(crate) fn monotone<F>(label: impl Into<String>, f: F) -> Modulus
    where
        F: Fn(u64) -> Nat + Send + Sync + 'static,
    {
        let label: String = label.into();
        Modulus {
            eval: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn eval(&self, k: u64) -> Nat {
        (self.eval)(k)
    }

    /// Evaluation at a possibly saturated argument; a saturated argument
    /// yields a saturated value.
    pub fn at(&self, k: Nat) -> Nat {
        if k.is_saturated() {
            Nat::SATURATED
        } else {
            self.eval(k.get())
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(&self, label: impl Into<String>) -> Modulus {
        let label: String = label.into();
        Modulus {
            eval: Arc::clone(&self.eval),
            label: label.into(),
        }
    }

    /// Scans `0..=k_max` and returns the first `k` with `eval(k+1) < eval(k)`.
    pub fn first_decrease(&self, k_max: u64) -> Option<u64> {
        let mut prev = self.eval(0);
        for k in 1..=k_max {
            let cur = self.eval(k);
            if cur < prev {
                return Some(k - 1);
            }
            prev = cur;
        }
        None
    }

    /// `k ↦ max(eval(k) - by, 0)`. Only meant for negative controls.
    pub fn shrunk(&self, by: u64) -> Modulus {
        let inner = self.clone();
        Modulus::monotone(format!("({}) - {by}", self.label), move |k| {
            inner.eval(k) - by
        })
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus").field("label", &self.label).finish()
    }
}

type TermFn = dyn Fn(u64) -> f64 + Send + Sync;

/// A real sequence presented by its terms, optionally valid only on a finite
/// prefix.
#[derive(Clone)]
pub struct RealSequenceOracle {
    term: Arc<TermFn>,
    description: Arc<str>,
    /// Number of valid terms; `None` when unbounded.
    len: Option<u64>,
}

impl RealSequenceOracle {
    pub fn from_fn<F>(description: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        let description: String = description.into();
        RealSequenceOracle {
            term: Arc::new(f),
            description: description.into(),
            len: None,
        }
    }

    /// A finite sequence; indices past the end are out of range.
    pub fn from_vec(description: impl Into<String>, values: Vec<f64>) -> Self {
        let description: String = description.into();
        let len = values.len() as u64;
        let values: Arc<[f64]> = values.into();
        RealSequenceOracle {
            term: Arc::new(move |n| values[n as usize]),
            description: description.into(),
            len: Some(len),
        }
    }

    /// Restricts the valid range to `0..=horizon`.
    pub fn with_horizon(mut self, horizon: u64) -> Self {
        let len = horizon.saturating_add(1);
        self.len = Some(self.len.map_or(len, |l| l.min(len)));
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Last valid index, `None` when unbounded.
    pub fn horizon(&self) -> Option<u64> {
        self.len.map(|l| l.saturating_sub(1))
    }

    pub fn check_index(&self, n: u64) -> Result<(), ModuliError> {
        match self.len {
            Some(len) if n >= len => Err(ModuliError::HorizonExceeded {
                sequence: self.description.to_string(),
                index: n,
                horizon: len.saturating_sub(1),
            }),
            _ => Ok(()),
        }
    }

    pub fn term(&self, n: u64) -> Result<f64, ModuliError> {
        self.check_index(n)?;
        Ok((self.term)(n))
    }

    /// Terms `0..=n_max`.
    pub fn prefix(&self, n_max: u64) -> Result<Vec<f64>, ModuliError> {
        self.check_index(n_max)?;
        Ok((0..=n_max).map(|n| (self.term)(n)).collect())
    }

    /// Terms `0..=n_max`, rejecting negative values.
    pub fn nonnegative_prefix(&self, n_max: u64) -> Result<Vec<f64>, ModuliError> {
        let values = self.prefix(n_max)?;
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(ModuliError::NegativeTerm {
                sequence: self.description.to_string(),
                index: i as u64,
                value: v,
            });
        }
        Ok(values)
    }

    /// The sequence of partial sums `n ↦ Σ_{i<=n} term(i)`, materialized up
    /// to `n_max`.
    pub fn partial_sums(&self, n_max: u64) -> Result<RealSequenceOracle, ModuliError> {
        let terms = self.nonnegative_prefix(n_max)?;
        let mut acc = 0.0;
        let sums = terms
            .into_iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect();
        Ok(RealSequenceOracle::from_vec(
            format!("partial sums of {}", self.description),
            sums,
        ))
    }
}

impl fmt::Debug for RealSequenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealSequenceOracle")
            .field("description", &self.description)
            .field("len", &self.len)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_is_normalized_to_running_max() {
        let m = Modulus::from_fn("zigzag", |k| if k % 2 == 0 { 10 - k.min(10) } else { k });
        for k in 0..30 {
            assert!(m.eval(k + 1) >= m.eval(k), "decrease at {k}");
        }
        assert_eq!(m.eval(0), Nat::new(10));
        assert_eq!(m.eval(11), Nat::new(11));
        assert_eq!(m.first_decrease(100), None);
    }

    #[test]
    fn table_uses_prefix_max_and_tail() {
        let m = Modulus::from_table(
            "t",
            vec![Nat::new(3), Nat::new(1), Nat::new(5)],
            Nat::new(4),
        );
        let got: Vec<u64> = (0..5).map(|k| m.eval(k).get()).collect();
        assert_eq!(got, vec![3, 3, 5, 5, 5]);
    }

    #[test]
    fn saturated_argument_saturates() {
        assert!(Modulus::constant("c", 3).at(Nat::SATURATED).is_saturated());
        assert_eq!(Modulus::identity().at(Nat::new(9)), Nat::new(9));
    }

    #[test]
    fn shrunk_stays_monotone() {
        let m = Modulus::from_fn("lin", |k| 6 * k + 4).shrunk(20);
        assert_eq!(m.eval(0), Nat::ZERO);
        assert_eq!(m.eval(5), Nat::new(14));
        assert_eq!(m.first_decrease(50), None);
    }

    #[test]
    fn oracle_horizon_is_enforced() {
        let s = RealSequenceOracle::from_vec("v", vec![1.0, 2.0]);
        assert_eq!(s.horizon(), Some(1));
        assert_eq!(s.term(1), Ok(2.0));
        assert!(matches!(
            s.term(2),
            Err(ModuliError::HorizonExceeded { index: 2, horizon: 1, .. })
        ));
        let empty = RealSequenceOracle::from_vec("e", vec![]);
        assert!(empty.term(0).is_err());
    }

    #[test]
    fn partial_sums_reject_negative_terms() {
        let s = RealSequenceOracle::from_fn("alt", |n| if n == 3 { -1.0 } else { 1.0 });
        assert!(matches!(
            s.partial_sums(5),
            Err(ModuliError::NegativeTerm { index: 3, .. })
        ));
        let ok = RealSequenceOracle::from_fn("ones", |_| 1.0).partial_sums(4).unwrap();
        assert_eq!(ok.term(4), Ok(5.0));
    }
}
