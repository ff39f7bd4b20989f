//! Every certificate that applies to a configuration.

use crate::iteration::{AlphaSchedule, ErrorSchedule, LambdaSchedule, ParamSchedule, ScheduleModuli};
use crate::moduli::{Modulus, Nat};
use crate::operators::{ContractionMap, Point};

use super::formulas::{
    derive_error_moduli, error_head, kz_bound, kz_bound_with_allowance, linear_rates_example1,
    linear_rates_example2, phi_rate, phi_star_rate, psi_rate, psi_star_rate, theta_m_rate,
    theta_star_m_rate, KzMode, LambdaModulus,
};
use super::{RateCertificate, RateError};

#[derive(Debug, Clone)]
pub struct CatalogOptions {
    /// Indices `m` for the fixed-step residuals.
    pub ms: Vec<u64>,
    /// Also build the general certificates when a closed-form linear family applies.
    pub general: bool,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            ms: vec![0],
            general: true,
        }
    }
}

enum Preset {
    First { alpha: f64 },
    Second { alpha: f64, e_star: Point },
}

fn preset(s: &ParamSchedule) -> Option<Preset> {
    let AlphaSchedule::LinearExample { alpha, j } = s.alpha else {
        return None;
    };
    match (&s.lambda, &s.error) {
        (LambdaSchedule::Constant(_), ErrorSchedule::Zero) => Some(Preset::First { alpha }),
        (LambdaSchedule::LinearExample { j: jl }, ErrorSchedule::InverseSquare { e_star, j: je })
            if *jl == j && *je == j =>
        {
            Some(Preset::Second {
                alpha,
                e_star: e_star.clone(),
            })
        }
        _ => None,
    }
}

fn need(m: &Option<Modulus>, what: &str) -> Result<Modulus, RateError> {
    m.clone().ok_or_else(|| RateError::MissingModulus(what.into()))
}

/// The step-size moduli available, in order of preference.
fn lambda_moduli(m: &ScheduleModuli) -> Vec<(&'static str, LambdaModulus)> {
    let mut out = Vec::new();
    if let Some(g) = &m.gamma1 {
        out.push(("", LambdaModulus::Ratio(g.clone())));
    }
    if let Some(g) = &m.gamma1_star {
        out.push(("[ratio-star]", LambdaModulus::RatioStar(g.clone())));
    }
    if let (Some(g3), Some(b)) = (&m.gamma3, m.lambda_bound) {
        out.push((
            "[gamma3]",
            LambdaModulus::Derived {
                gamma3: g3.clone(),
                bound: b,
            },
        ));
    }
    out
}

fn mark(mut c: RateCertificate, suffix: &str, horizon_limited: Option<u64>) -> RateCertificate {
    c.name.push_str(suffix);
    if let Some(h) = horizon_limited {
        c.provenance.push_str(&format!(
            "; moduli read off the terms with index <= {h}, so the certificate is only horizon-valid"
        ));
    }
    c
}

fn general_certificates(
    sched: &ParamSchedule,
    moduli: &ScheduleModuli,
    x0: &Point,
    z: &Point,
    f: &ContractionMap,
    opts: &CatalogOptions,
) -> Result<Vec<RateCertificate>, RateError> {
    let sigma1 = need(&moduli.sigma1, "σ1 (rate of divergence of Σ α_n)")?;
    let sigma2 = need(&moduli.sigma2, "σ2 (Cauchy modulus of Σ |α_n - α_{n+1}|)")?;
    let lambdas = lambda_moduli(moduli);
    if lambdas.is_empty() {
        return Err(RateError::MissingModulus(
            "γ1, γ1* or γ3 with a lower bound (step-size regularity)".into(),
        ));
    }
    let alpha = f.alpha();
    let hl = moduli.horizon_limited;
    let dim = x0.dim();
    let mut out = Vec::new();
    if sched.error.is_zero() {
        let kz = kz_bound(x0, z, f, 0, KzMode::Vam)?;
        let mut first = None;
        for (suffix, g) in &lambdas {
            let phi = phi_star_rate(&sigma1, &sigma2, g, kz, alpha)?;
            first.get_or_insert_with(|| phi.clone());
            out.push(mark(phi, suffix, hl));
        }
        if let (Some(phi), Some(sigma3)) = (first, &moduli.sigma3) {
            let psi = psi_star_rate(&phi, sigma3, kz)?;
            out.push(mark(psi.clone(), "", hl));
            if let Some(b) = moduli.lambda_bound {
                for &m in &opts.ms {
                    let theta = theta_star_m_rate(&psi, b, sched.lambda_upper(m), m)?;
                    out.push(mark(theta, "", hl));
                }
            }
        }
    } else {
        let theta1 = need(&moduli.theta1, "θ1 (Cauchy modulus of Σ |e_n|)")?;
        let head = error_head(&theta1, |n| sched.error_at(n, dim))?;
        let kz = kz_bound(x0, z, f, head, KzMode::Vame)?;
        let mut first = None;
        for (suffix, g) in &lambdas {
            let phi = phi_rate(&sigma1, &sigma2, g, &theta1, kz, alpha)?;
            first.get_or_insert_with(|| phi.clone());
            out.push(mark(phi, suffix, hl));
        }
        if let (Some(phi), Some(sigma3)) = (first, &moduli.sigma3) {
            let theta2 = match &moduli.theta2 {
                Some(t) => t.clone(),
                None => derive_error_moduli(&theta1, |n| sched.error_at(n, dim))?.0,
            };
            let psi = psi_rate(&phi, sigma3, &theta2, kz)?;
            out.push(mark(psi.clone(), "", hl));
            if let Some(b) = moduli.lambda_bound {
                for &m in &opts.ms {
                    let theta = theta_m_rate(&psi, b, sched.lambda_upper(m), m)?;
                    out.push(mark(theta, "", hl));
                }
            }
        }
    }
    Ok(out)
}

/// Builds every certificate applicable to the iteration started at `x0`
/// with known zero `z`: the general rates when the schedule carries moduli,
/// and the closed-form linear rates for the two linear families.
pub fn standard_certificates(
    sched: &ParamSchedule,
    x0: &Point,
    z: &Point,
    f: &ContractionMap,
    opts: &CatalogOptions,
) -> Result<Vec<RateCertificate>, RateError> {
    let preset = preset(sched);
    let mut out = Vec::new();
    match &preset {
        Some(Preset::First { alpha }) => {
            let kz = kz_bound(x0, z, f, 0, KzMode::Vam)?;
            let (phi, psi) = linear_rates_example1(kz, *alpha)?;
            out.push(phi);
            for &m in &opts.ms {
                out.push(psi.retarget(m)?);
            }
            out.push(psi);
        }
        Some(Preset::Second { alpha, e_star }) => {
            let (norm, j) = (e_star.norm(), crate::iteration::linear_offset(*alpha));
            let allowance = Nat::ceil_f64(norm / (j as f64 - 1.0)).get();
            let kz = kz_bound_with_allowance(x0, z, f, allowance as f64)?;
            let (phi, psi, theta, _) = linear_rates_example2(kz, *alpha, norm)?;
            out.push(phi);
            out.push(psi);
            for &m in &opts.ms {
                out.push(theta.retarget(m)?);
            }
        }
        None => {}
    }
    match &sched.moduli {
        Some(m) if preset.is_none() || opts.general => {
            out.extend(general_certificates(sched, m, x0, z, f, opts)?);
        }
        Some(_) => {}
        None if preset.is_none() => {
            return Err(RateError::MissingModulus(format!(
                "schedule `{}` (no closed-form or brute-force moduli attached)",
                sched.label
            )));
        }
        None => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::AlphaSchedule;

    fn names(cs: &[RateCertificate]) -> Vec<String> {
        cs.iter().map(|c| c.name.clone()).collect()
    }

    #[test]
    fn first_family_catalog() {
        let s = ParamSchedule::example1(0.0, 1.0).unwrap();
        let z = Point::zeros(1);
        let f = ContractionMap::constant(z.clone()).unwrap();
        let x0 = Point::new(vec![1.0]).unwrap();
        let cs = standard_certificates(&s, &x0, &z, &f, &CatalogOptions::default()).unwrap();
        let n = names(&cs);
        assert!(n.contains(&"phi0".to_string()));
        assert!(n.contains(&"psi0@m0".to_string()));
        assert!(n.contains(&"phi_star".to_string()));
        let phi0 = cs.iter().find(|c| c.name == "phi0").unwrap();
        assert_eq!(phi0.modulus.eval(3).get(), 14);
    }

    #[test]
    fn second_family_theta0() {
        let s = ParamSchedule::example2(0.0, Point::zeros(1)).unwrap();
        let z = Point::zeros(1);
        let f = ContractionMap::constant(z.clone()).unwrap();
        let x0 = Point::new(vec![1.0]).unwrap();
        let opts = CatalogOptions {
            ms: vec![0, 5],
            general: false,
        };
        let cs = standard_certificates(&s, &x0, &z, &f, &opts).unwrap();
        assert_eq!(names(&cs), vec!["phi0", "psi0", "theta0@m0", "theta0@m5"]);
        assert_eq!(cs[2].modulus.eval(0).get(), 34);
    }

    #[test]
    fn missing_moduli_is_an_error() {
        let s = ParamSchedule::new(
            AlphaSchedule::power(1.0, 1.0, 0.5).unwrap(),
            LambdaSchedule::Constant(1.0),
            ErrorSchedule::Zero,
        );
        let z = Point::zeros(1);
        let f = ContractionMap::constant(z.clone()).unwrap();
        let err = standard_certificates(&s, &z, &z, &f, &CatalogOptions::default()).unwrap_err();
        assert!(matches!(err, RateError::MissingModulus(_)));
    }
}
