//! Certified versus empirical indices of asymptotic regularity.

use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::iteration::IterationTrace;
use crate::moduli::Nat;
use crate::rates::{Hypothesis, RateCertificate, RateError, ResidualKind};
use crate::TOL_FLOAT;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("reports do not describe the same run: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl VerifyError {
    /// The failing hypothesis, when the error is a precondition violation.
    pub fn failed_hypothesis(&self) -> Option<Hypothesis> {
        match self {
            VerifyError::Rate(RateError::Precondition { tag, .. }) => Some(*tag),
            _ => None,
        }
    }
}

/// The residual sequence of `kind` along the trace. Successive residuals
/// stop one index short of the horizon.
pub fn residuals(trace: &IterationTrace, kind: ResidualKind) -> Result<Vec<f64>, VerifyError> {
    Ok(match kind {
        ResidualKind::Successive => trace.successive_residuals().to_vec(),
        ResidualKind::Scheme => trace.scheme_residuals().to_vec(),
        ResidualKind::Fixed(m) => trace.fixed_residuals(m).map_err(RateError::from)?,
    })
}

/// `out[n] = max r[n..]`; nonincreasing.
fn suffix_max(r: &[f64]) -> Vec<f64> {
    let mut out = r.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

fn threshold(k: u64) -> f64 {
    1.0 / (k as f64 + 1.0)
}

/// Least `n` with `r[i] <= 1/(k+1) + TOL_FLOAT` for every `i >= n`.
fn empirical_from_suffix(sm: &[f64], k: u64) -> Option<u64> {
    let t = threshold(k) + TOL_FLOAT;
    let n = sm.partition_point(|&v| !(v <= t));
    (n < sm.len()).then_some(n as u64)
}

/// Least `n` such that every residual of `kind` from `n` up to the horizon
/// is at most `1/(k+1) + TOL_FLOAT`; `None` when the last one is not.
pub fn empirical_rate(trace: &IterationTrace, kind: ResidualKind, k: u64) -> Result<Option<u64>, VerifyError> {
    Ok(empirical_from_suffix(&suffix_max(&residuals(trace, kind)?), k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    /// The certified index lies beyond the horizon; nothing to check.
    HorizonSkipped,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::HorizonSkipped => "horizon-skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k: u64,
    pub certified: Nat,
    pub empirical: Option<u64>,
    /// `max` of the residuals over `[certified, horizon]`.
    pub max_residual: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub certificate: String,
    pub residual_kind: ResidualKind,
    /// Last index of the residual sequence.
    pub horizon: u64,
    pub fingerprint: String,
    pub rows: Vec<ReportRow>,
}

/// Largest `k <= cap` whose certified index lies within the residuals of
/// `kind`, or `None` if even `k = 0` does not.
pub fn k_max_in_horizon(cert: &RateCertificate, horizon: u64, cap: u64) -> Option<u64> {
    let fits = |k: u64| cert.modulus.eval(k).get() <= horizon;
    if !fits(0) {
        return None;
    }
    if fits(cap) {
        return Some(cap);
    }
    let (mut lo, mut hi) = (0, cap);
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

/// Re-checks the certificate's hypotheses on `trace`, then compares the
/// certified index with the residuals for every `k <= k_max`.
pub fn certify(trace: &IterationTrace, cert: &RateCertificate, k_max: u64) -> Result<VerificationReport, VerifyError> {
    cert.check_preconditions(trace)?;
    certify_unchecked(trace, cert, k_max)
}

/// [`certify`] without the hypothesis check.
pub fn certify_unchecked(
    trace: &IterationTrace,
    cert: &RateCertificate,
    k_max: u64,
) -> Result<VerificationReport, VerifyError> {
    let r = residuals(trace, cert.residual_kind)?;
    let sm = suffix_max(&r);
    let rows = (0..=k_max)
        .map(|k| {
            let certified = cert.modulus.eval(k);
            let empirical = empirical_from_suffix(&sm, k);
            let max_residual = certified.as_index().and_then(|i| sm.get(i).copied());
            let status = match max_residual {
                None => RowStatus::HorizonSkipped,
                Some(v) if v <= threshold(k) + TOL_FLOAT => RowStatus::Pass,
                Some(_) => RowStatus::Fail,
            };
            ReportRow {
                k,
                certified,
                empirical,
                max_residual,
                status,
            }
        })
        .collect();
    Ok(VerificationReport {
        certificate: cert.name.clone(),
        residual_kind: cert.residual_kind,
        horizon: r.len().saturating_sub(1) as u64,
        fingerprint: trace.fingerprint(),
        rows,
    })
}

impl VerificationReport {
    fn count(&self, s: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == s).count()
    }

    pub fn passed(&self) -> usize {
        self.count(RowStatus::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(RowStatus::Fail)
    }

    pub fn skipped(&self) -> usize {
        self.count(RowStatus::HorizonSkipped)
    }

    /// No fail rows.
    pub fn ok(&self) -> bool {
        self.failed() == 0
    }

    pub fn first_failure(&self) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.status == RowStatus::Fail)
    }

    /// Columns `k, certified, empirical, max_residual, status`; absent
    /// values are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), VerifyError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "certified", "empirical", "max_residual", "status"])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.certified.to_string(),
                r.empirical.map(|e| e.to_string()).unwrap_or_default(),
                r.max_residual.map(|v| v.to_string()).unwrap_or_default(),
                r.status.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} [{}] horizon {}: {} pass, {} fail, {} horizon-skipped",
            self.certificate,
            self.residual_kind,
            self.horizon,
            self.passed(),
            self.failed(),
            self.skipped()
        );
        if let Some(r) = self.first_failure() {
            s.push_str(&format!(
                "; first failure at k={} (index {}, residual {} > {})",
                r.k,
                r.certified,
                r.max_residual.unwrap_or(f64::NAN),
                threshold(r.k)
            ));
        }
        s
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        writeln!(f, "run: {}", self.fingerprint)
    }
}

/// Certified indices of several certificates side by side, with the
/// empirical index.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub certificates: Vec<String>,
    /// `(k, certified per certificate, empirical)`.
    pub rows: Vec<(u64, Vec<Nat>, Option<u64>)>,
}

/// Builds the table over the `k` range common to all reports, which must
/// come from the same run and residual.
pub fn compare_certificates(reports: &[VerificationReport]) -> Result<ComparisonTable, VerifyError> {
    let Some(first) = reports.first() else {
        return Ok(ComparisonTable {
            certificates: vec![],
            rows: vec![],
        });
    };
    for r in &reports[1..] {
        if r.fingerprint != first.fingerprint {
            return Err(VerifyError::Mismatch(format!(
                "{} and {} were checked on different runs",
                first.certificate, r.certificate
            )));
        }
        if r.residual_kind != first.residual_kind {
            return Err(VerifyError::Mismatch(format!(
                "{} bounds the {} residual, {} the {} residual",
                first.certificate, first.residual_kind, r.certificate, r.residual_kind
            )));
        }
    }
    let len = reports.iter().map(|r| r.rows.len()).min().unwrap_or(0);
    let rows = (0..len)
        .map(|i| {
            let row = &first.rows[i];
            (row.k, reports.iter().map(|r| r.rows[i].certified).collect(), row.empirical)
        })
        .collect();
    Ok(ComparisonTable {
        certificates: reports.iter().map(|r| r.certificate.clone()).collect(),
        rows,
    })
}

impl ComparisonTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), VerifyError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        header.extend(self.certificates.iter().cloned());
        header.push("empirical".into());
        w.write_record(&header)?;
        for (k, certified, empirical) in &self.rows {
            let mut rec = vec![k.to_string()];
            rec.extend(certified.iter().map(Nat::to_string));
            rec.push(empirical.map(|e| e.to_string()).unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
