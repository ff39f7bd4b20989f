//! A priori bounds along a recorded trajectory.

use crate::operators::Point;
use crate::TOL_FLOAT;

use super::{kz_sequence, IterationError, IterationTrace};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceCheck {
    Holds,
    /// `item` numbers the bound that failed: 1 to 4 for the four bounds of
    /// [`check_bound_lemma`], 0 for [`check_main_inequality`] and
    /// [`check_kz_bounded`].
    Violated {
        item: u8,
        n: u64,
        m: Option<u64>,
        lhs: f64,
        rhs: f64,
    },
}

impl TraceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, TraceCheck::Holds)
    }
}

fn violated(item: u8, n: usize, m: Option<u64>, lhs: f64, rhs: f64) -> TraceCheck {
    TraceCheck::Violated {
        item,
        n: n as u64,
        m,
        lhs,
        rhs,
    }
}

/// For a zero `z` and `K_{z,n}` as in [`kz_sequence`], checks in order:
///
/// 1. `‖x_n - z‖, ‖f(x_n) - z‖ <= K_{z,n}`;
/// 2. `‖x_{n+1} - x_n‖ <= 2 K_{z,n+1}`;
/// 3. `‖J_{λ_m} x_n - z‖ <= K_{z,n}`;
/// 4. `‖J_{λ_m} x_n - x_n‖, ‖J_{λ_m} x_n - f(x_n)‖ <= 2 K_{z,n}`,
///
/// for every `n` of the trace and every `m` in `m_samples`. Reports the first
/// failure of the lowest-numbered item.
pub fn check_bound_lemma(
    trace: &IterationTrace,
    z: &Point,
    m_samples: &[u64],
) -> Result<TraceCheck, IterationError> {
    let kz = kz_sequence(trace, z)?;
    let xs = trace.points();
    let f = trace.contraction();
    let fx: Vec<Point> = xs.iter().map(|x| f.apply(x)).collect::<Result<_, _>>()?;

    for (n, x) in xs.iter().enumerate() {
        let rhs = kz[n] + TOL_FLOAT;
        for lhs in [x.dist(z), fx[n].dist(z)] {
            if !(lhs <= rhs) {
                return Ok(violated(1, n, None, lhs, kz[n]));
            }
        }
    }
    for (n, &lhs) in trace.successive_residuals().iter().enumerate() {
        if !(lhs <= 2.0 * kz[n + 1] + TOL_FLOAT) {
            return Ok(violated(2, n, None, lhs, 2.0 * kz[n + 1]));
        }
    }
    let op = trace.operator();
    let mut resolved = Vec::with_capacity(m_samples.len());
    for &m in m_samples {
        let l = trace.schedule().lambda_at(m);
        let jm: Vec<Point> = xs.iter().map(|x| op.resolvent(l, x)).collect::<Result<_, _>>()?;
        for (n, j) in jm.iter().enumerate() {
            let lhs = j.dist(z);
            if !(lhs <= kz[n] + TOL_FLOAT) {
                return Ok(violated(3, n, Some(m), lhs, kz[n]));
            }
        }
        resolved.push((m, jm));
    }
    for (m, jm) in &resolved {
        for (n, j) in jm.iter().enumerate() {
            let rhs = 2.0 * kz[n];
            for lhs in [j.dist(&xs[n]), j.dist(&fx[n])] {
                if !(lhs <= rhs + TOL_FLOAT) {
                    return Ok(violated(4, n, Some(*m), lhs, rhs));
                }
            }
        }
    }
    Ok(TraceCheck::Holds)
}

/// Which step-size ratio enters the recursive inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioVariant {
    /// `|1 - λ_{n+1}/λ_n|`.
    Ratio,
    /// `|1 - λ_n/λ_{n+1}|`.
    RatioStar,
}

/// `‖x_{n+2} - x_{n+1}‖ <= (1 - (1-α)α_{n+1}) ‖x_{n+1} - x_n‖ + M_n + ‖e_{n+1} - e_n‖`
/// with `M_n = 2K_{z,n}(|α_{n+1} - α_n| + (1 - α_{n+1}) r_n)` and `r_n` the
/// ratio term selected by `variant`.
pub fn check_main_inequality(
    trace: &IterationTrace,
    z: &Point,
    variant: RatioVariant,
) -> Result<TraceCheck, IterationError> {
    if trace.points().len() < 3 {
        return Err(IterationError::Domain("the inequality needs at least three iterates".into()));
    }
    let kz = kz_sequence(trace, z)?;
    let alpha = trace.contraction().alpha();
    let (a, l, e) = (trace.alphas(), trace.lambdas(), trace.errors());
    let s = trace.successive_residuals();
    for n in 0..s.len() - 1 {
        let ratio = match variant {
            RatioVariant::Ratio => (1.0 - l[n + 1] / l[n]).abs(),
            RatioVariant::RatioStar => (1.0 - l[n] / l[n + 1]).abs(),
        };
        let m = 2.0 * kz[n] * ((a[n + 1] - a[n]).abs() + (1.0 - a[n + 1]) * ratio);
        let rhs = (1.0 - (1.0 - alpha) * a[n + 1]) * s[n] + m + e[n + 1].dist(&e[n]);
        if !(s[n + 1] <= rhs + TOL_FLOAT) {
            return Ok(violated(0, n, None, s[n + 1], rhs));
        }
    }
    Ok(TraceCheck::Holds)
}

/// `K_{z,n} <= bound` along the whole trace.
pub fn check_kz_bounded(trace: &IterationTrace, z: &Point, bound: f64) -> Result<TraceCheck, IterationError> {
    let kz = kz_sequence(trace, z)?;
    Ok(kz
        .iter()
        .position(|&k| !(k <= bound + TOL_FLOAT))
        .map_or(TraceCheck::Holds, |n| violated(0, n, None, kz[n], bound)))
}
