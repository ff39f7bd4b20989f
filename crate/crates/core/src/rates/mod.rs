//! Rate certificates: explicit moduli bounding the residuals of the
//! iteration, each carrying the hypotheses it was built under.

mod catalog;
mod claims;
mod formulas;

use std::fmt;

use thiserror::Error;

use crate::iteration::IterationError;
use crate::moduli::{Modulus, ModuliError};
use crate::operators::OperatorError;

pub use catalog::{standard_certificates, CatalogOptions};
pub use claims::{Allowance, Claim, LinearFamily, Precondition, SeqRef};
pub use formulas::{
    derive_error_moduli, derive_gamma1, error_head, kz_bound, kz_bound_with_allowance,
    linear_rates_example1, linear_rates_example2, phi_rate, phi_star_rate, psi_rate,
    psi_star_rate, theta_m_rate, theta_star_m_rate, vam_rates, KzMode, LambdaModulus,
    LinearBound,
};

#[derive(Debug, Error)]
pub enum RateError {
    #[error("no modulus available for {0}")]
    MissingModulus(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("hypothesis `{tag}` fails: {detail}")]
    Precondition { tag: Hypothesis, detail: String },
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Which residual a certificate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// `‖x_{n+1} - x_n‖`.
    Successive,
    /// `‖x_n - J_{λ_n} x_n‖`.
    Scheme,
    /// `‖x_n - J_{λ_m} x_n‖`.
    Fixed(u64),
}

impl fmt::Display for ResidualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualKind::Successive => f.write_str("successive"),
            ResidualKind::Scheme => f.write_str("scheme"),
            ResidualKind::Fixed(m) => write!(f, "fixed_m({m})"),
        }
    }
}

/// Named hypotheses on the parameters of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `Σ α_n = ∞` with rate of divergence `σ1`.
    AlphaDivergence,
    /// `Σ |α_n - α_{n+1}| < ∞` with Cauchy modulus `σ2`.
    AlphaVariation,
    /// `α_n → 0` with rate `σ3`.
    AlphaVanishing,
    /// `Σ |1 - λ_{n+1}/λ_n| < ∞` with Cauchy modulus `γ1`.
    LambdaRatio,
    /// `Σ |1 - λ_n/λ_{n+1}| < ∞` with Cauchy modulus `γ1*`.
    LambdaRatioStar,
    /// `λ_n >= 1/Λ` for `n >= N_Λ`.
    LambdaLowerBound,
    /// `Σ |λ_n - λ_{n+1}| < ∞` with Cauchy modulus `γ3`.
    LambdaVariation,
    /// `Σ ‖e_n‖ < ∞` with Cauchy modulus `θ1`.
    ErrorsSummable,
    /// `‖e_n‖ → 0` with rate `θ2`.
    ErrorsVanish,
    /// `E >= Σ ‖e_n‖`.
    ErrorSumBound,
    /// The anchor constant `K_z` dominates the starting distances.
    AnchorBound,
    /// `Λ_m >= λ_m`.
    LambdaAtM,
    /// The parameters follow one of the two closed-form linear-rate families.
    ScheduleShape,
    /// `e_n = 0`.
    ErrorFree,
    /// The map is a contraction with the certificate's constant.
    ContractionConstant,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::AlphaDivergence => "alpha-divergence",
            Hypothesis::AlphaVariation => "alpha-variation",
            Hypothesis::AlphaVanishing => "alpha-vanishing",
            Hypothesis::LambdaRatio => "lambda-ratio",
            Hypothesis::LambdaRatioStar => "lambda-ratio-star",
            Hypothesis::LambdaLowerBound => "lambda-lower-bound",
            Hypothesis::LambdaVariation => "lambda-variation",
            Hypothesis::ErrorsSummable => "errors-summable",
            Hypothesis::ErrorsVanish => "errors-vanish",
            Hypothesis::ErrorSumBound => "error-sum-bound",
            Hypothesis::AnchorBound => "anchor-bound",
            Hypothesis::LambdaAtM => "lambda-m-bound",
            Hypothesis::ScheduleShape => "schedule-shape",
            Hypothesis::ErrorFree => "error-free",
            Hypothesis::ContractionConstant => "contraction-constant",
        };
        f.write_str(s)
    }
}

/// A modulus together with what it bounds and why.
#[derive(Clone, Debug)]
pub struct RateCertificate {
    pub name: String,
    pub modulus: Modulus,
    pub residual_kind: ResidualKind,
    pub provenance: String,
    pub preconditions: Vec<Precondition>,
    /// Whether the same modulus bounds `‖x_n - J_{λ_m} x_n‖` for every `m`.
    pub uniform_in_m: bool,
}

impl RateCertificate {
    /// `(k, modulus(k), 1/(k+1))` for `k <= k_max`.
    pub fn table(&self, k_max: u64) -> Vec<(u64, crate::moduli::Nat, f64)> {
        (0..=k_max)
            .map(|k| (k, self.modulus.eval(k), 1.0 / (k as f64 + 1.0)))
            .collect()
    }

    /// The same certificate for `‖x_n - J_{λ_m} x_n‖`; only for certificates
    /// that hold uniformly in `m`.
    pub fn retarget(&self, m: u64) -> Result<RateCertificate, RateError> {
        if !self.uniform_in_m {
            return Err(RateError::Domain(format!(
                "certificate {} depends on m and cannot be retargeted",
                self.name
            )));
        }
        let mut c = self.clone();
        c.residual_kind = ResidualKind::Fixed(m);
        c.name = format!("{}@m{m}", self.name);
        Ok(c)
    }

    /// `k ↦ max(modulus(k) - by, 0)`; a deliberately wrong certificate.
    pub fn shrunk(&self, by: u64) -> RateCertificate {
        let mut c = self.clone();
        c.modulus = self.modulus.shrunk(by);
        c.name = format!("{}-shrunk{by}", self.name);
        c.provenance = format!("{} (shrunk by {by})", self.provenance);
        c
    }

    /// Re-checks every recorded hypothesis along `trace`.
    pub fn check_preconditions(&self, trace: &crate::iteration::IterationTrace) -> Result<(), RateError> {
        for p in &self.preconditions {
            p.check(trace)?;
        }
        Ok(())
    }

    /// Writes the table of [`RateCertificate::table`] as CSV with columns
    /// `k, modulus_value, bound`; saturated values are written as `saturated`.
    pub fn write_csv<W: std::io::Write>(&self, k_max: u64, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "modulus_value", "bound"])?;
        for (k, v, b) in self.table(k_max) {
            w.write_record([k.to_string(), v.to_string(), b.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// The provenance block: formula, inputs and hypotheses.
    pub fn provenance_text(&self) -> String {
        let mut s = format!(
            "certificate: {}\nresidual: {}\nmodulus: {}\n{}\n",
            self.name,
            self.residual_kind,
            self.modulus.label(),
            self.provenance
        );
        if !self.preconditions.is_empty() {
            s.push_str("hypotheses:\n");
            for p in &self.preconditions {
                s.push_str(&format!("  - {}: {}\n", p.tag, p.claim));
            }
        }
        s
    }
}
