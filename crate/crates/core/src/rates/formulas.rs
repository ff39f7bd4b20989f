//! The rate formulas and the derivation lemmas feeding them.

use crate::iteration::{inverse_gap_ceil, linear_offset, LambdaLowerBound};
use crate::moduli::{ceil_div_gap, ceil_ln, Modulus, Nat};
use crate::operators::{ContractionMap, Point};

use super::claims::{Allowance, Claim, LinearFamily, Precondition, SeqRef};
use super::{Hypothesis, RateCertificate, RateError, ResidualKind};

/// Largest `θ1(0)` for which the error head is summed.
const HEAD_LIMIT: u64 = 100_000_000;

/// `k ↦ max{N, γ3(Λ(k+1) - 1)}`, a Cauchy modulus of both step-size ratio
/// series when `λ_n >= 1/Λ` for `n >= N`.
pub fn derive_gamma1(gamma3: &Modulus, lambda: u64, n_lambda: u64) -> Modulus {
    let g = gamma3.clone();
    let n = Nat::new(n_lambda);
    Modulus::monotone(
        format!("max{{{n_lambda}, γ3({lambda}(k+1)-1)}} with γ3 = {}", gamma3.label()),
        move |k| n.max(g.at((Nat::new(lambda) * (Nat::new(k) + 1)).pred())),
    )
}

/// `⌈Σ_{i<=θ1(0)} ‖e_i‖⌉`.
pub fn error_head(theta1: &Modulus, err: impl Fn(u64) -> Point) -> Result<u64, RateError> {
    let last = theta1.eval(0);
    if last.get() > HEAD_LIMIT {
        return Err(RateError::Domain(format!(
            "θ1(0) = {last} is too large to sum the error head"
        )));
    }
    let total: f64 = (0..=last.get()).map(|i| err(i).norm()).sum();
    // Summation error is far below this nudge.
    Ok(Nat::ceil_f64(total * (1.0 + 1e-12)).get())
}

/// `θ2 = θ1 + 1` and `E = ⌈Σ_{i<=θ1(0)} ‖e_i‖⌉ + 1`.
pub fn derive_error_moduli(theta1: &Modulus, err: impl Fn(u64) -> Point) -> Result<(Modulus, u64), RateError> {
    let head = error_head(theta1, err)?;
    let t = theta1.clone();
    let theta2 = Modulus::monotone(format!("({}) + 1", theta1.label()), move |k| t.eval(k) + 1);
    Ok((theta2, head + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KzMode {
    /// With errors: adds the error head and 1.
    Vame,
    /// Error free.
    Vam,
    /// `f` constant; `inexact` adds the error head and 1.
    Hppa { inexact: bool },
}

fn anchor_base(x0: &Point, z: &Point, f: &ContractionMap) -> Result<f64, RateError> {
    let alpha = f.alpha();
    if !(alpha < 1.0) {
        return Err(RateError::Domain(format!("contraction constant {alpha} must be below 1")));
    }
    Ok(x0.dist(z).max(f.apply(z)?.dist(z) / (1.0 - alpha)))
}

/// The least positive natural `K` with
/// `K >= max{‖x0 - z‖, ‖f(z) - z‖/(1-α)}`, plus `err_sum_head + 1` when
/// errors are present.
pub fn kz_bound(x0: &Point, z: &Point, f: &ContractionMap, err_sum_head: u64, mode: KzMode) -> Result<u64, RateError> {
    if matches!(mode, KzMode::Hppa { .. }) && f.alpha() != 0.0 {
        return Err(RateError::Domain("the proximal point variant needs a constant map".into()));
    }
    let extra = match mode {
        KzMode::Vame | KzMode::Hppa { inexact: true } => err_sum_head as f64 + 1.0,
        KzMode::Vam | KzMode::Hppa { inexact: false } => 0.0,
    };
    kz_bound_with_allowance(x0, z, f, extra)
}

/// The least positive natural `>= max{‖x0 - z‖, ‖f(z) - z‖/(1-α)} + extra`.
pub fn kz_bound_with_allowance(x0: &Point, z: &Point, f: &ContractionMap, extra: f64) -> Result<u64, RateError> {
    let v = anchor_base(x0, z, f)? + extra;
    Ok(Nat::ceil_f64(v).get().max(1))
}

/// The step-size modulus entering the rates, with the hypothesis it
/// witnesses.
#[derive(Debug, Clone)]
pub enum LambdaModulus {
    /// Cauchy modulus of `Σ |1 - λ_{n+1}/λ_n|`.
    Ratio(Modulus),
    /// Cauchy modulus of `Σ |1 - λ_n/λ_{n+1}|`.
    RatioStar(Modulus),
    /// Obtained through [`derive_gamma1`] from a Cauchy modulus of
    /// `Σ |λ_n - λ_{n+1}|` and a lower bound.
    Derived { gamma3: Modulus, bound: LambdaLowerBound },
}

impl LambdaModulus {
    pub fn modulus(&self) -> Modulus {
        match self {
            LambdaModulus::Ratio(m) | LambdaModulus::RatioStar(m) => m.clone(),
            LambdaModulus::Derived { gamma3, bound } => derive_gamma1(gamma3, bound.lambda, bound.from),
        }
    }

    fn preconditions(&self) -> Vec<Precondition> {
        match self {
            LambdaModulus::Ratio(m) => vec![Precondition::new(
                Hypothesis::LambdaRatio,
                Claim::SeriesCauchy {
                    seq: SeqRef::LambdaRatio,
                    modulus: m.clone(),
                },
            )],
            LambdaModulus::RatioStar(m) => vec![Precondition::new(
                Hypothesis::LambdaRatioStar,
                Claim::SeriesCauchy {
                    seq: SeqRef::LambdaRatioStar,
                    modulus: m.clone(),
                },
            )],
            LambdaModulus::Derived { gamma3, bound } => vec![
                Precondition::new(
                    Hypothesis::LambdaVariation,
                    Claim::SeriesCauchy {
                        seq: SeqRef::LambdaVariation,
                        modulus: gamma3.clone(),
                    },
                ),
                lower_bound_claim(*bound),
            ],
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            LambdaModulus::Ratio(_) => "γ1 (ratio λ_{n+1}/λ_n)",
            LambdaModulus::RatioStar(_) => "γ1* (ratio λ_n/λ_{n+1})",
            LambdaModulus::Derived { .. } => "γ1 derived from γ3 and the lower bound",
        }
    }
}

fn lower_bound_claim(b: LambdaLowerBound) -> Precondition {
    Precondition::new(
        Hypothesis::LambdaLowerBound,
        Claim::LambdaLowerBound {
            lambda: b.lambda,
            from: b.from,
        },
    )
}

fn cauchy(tag: Hypothesis, seq: SeqRef, modulus: &Modulus) -> Precondition {
    Precondition::new(
        tag,
        Claim::SeriesCauchy {
            seq,
            modulus: modulus.clone(),
        },
    )
}

fn vanishing(tag: Hypothesis, seq: SeqRef, modulus: &Modulus) -> Precondition {
    Precondition::new(
        tag,
        Claim::Vanishing {
            seq,
            modulus: modulus.clone(),
        },
    )
}

fn contraction(alpha: f64) -> Precondition {
    Precondition::new(Hypothesis::ContractionConstant, Claim::ContractionConstant { alpha })
}

fn anchor(kz: u64, allowance: Allowance) -> Precondition {
    Precondition::new(Hypothesis::AnchorBound, Claim::AnchorBound { kz, allowance })
}

fn check_inputs(kz: u64, alpha: f64) -> Result<(), RateError> {
    if kz == 0 {
        return Err(RateError::Domain("K must be a positive natural".into()));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(RateError::Domain(format!("contraction constant {alpha} must lie in [0, 1)")));
    }
    Ok(())
}

/// `σ1(⌈(χ(2k+1) + 1 + ⌈ln(4K(k+1))⌉)/(1-α)⌉ + 1)`.
fn outer_phi(sigma1: Modulus, chi: Modulus, kz: u64, alpha: f64) -> impl Fn(u64) -> Nat + Send + Sync {
    move |k| {
        let kk = Nat::new(k);
        let ln = ceil_ln(Nat::new(4) * kz * (kk + 1));
        let p = chi.at(kk * 2 + 1) + 1 + ln;
        sigma1.at(ceil_div_gap(p, alpha) + 1)
    }
}

/// `(c·K)(k+1) - 1`.
fn scaled_arg(c: u64, kz: u64, k: u64) -> Nat {
    (Nat::new(c) * kz * (Nat::new(k) + 1)).pred()
}

/// The rate of asymptotic regularity `Φ` of the iteration with errors:
///
/// `χ(k) = max{σ2(6K(k+1)-1), γ1(6K(k+1)-1), θ1(6k+5)}`,
/// `Φ(k) = σ1(⌈(χ(2k+1) + 1 + ⌈ln(4K(k+1))⌉)/(1-α)⌉ + 1)`.
///
/// `kz` has to satisfy the anchor bound with the error head, see
/// [`kz_bound`] in mode [`KzMode::Vame`].
pub fn phi_rate(
    sigma1: &Modulus,
    sigma2: &Modulus,
    gamma1: &LambdaModulus,
    theta1: &Modulus,
    kz: u64,
    alpha: f64,
) -> Result<RateCertificate, RateError> {
    check_inputs(kz, alpha)?;
    let (s2, g1, t1) = (sigma2.clone(), gamma1.modulus(), theta1.clone());
    let chi = Modulus::monotone("χ", move |k| {
        let a = scaled_arg(6, kz, k);
        s2.at(a).max(g1.at(a)).max(t1.at(Nat::new(6) * k + 5))
    });
    let phi = outer_phi(sigma1.clone(), chi, kz, alpha);
    let label = format!("Φ[K={kz}, α={alpha}]");
    let mut preconditions = vec![
        Precondition::new(
            Hypothesis::AlphaDivergence,
            Claim::Divergence {
                seq: SeqRef::Alpha,
                modulus: sigma1.clone(),
            },
        ),
        cauchy(Hypothesis::AlphaVariation, SeqRef::AlphaVariation, sigma2),
    ];
    preconditions.extend(gamma1.preconditions());
    preconditions.push(cauchy(Hypothesis::ErrorsSummable, SeqRef::ErrorNorm, theta1));
    preconditions.push(anchor(kz, Allowance::ErrorHead(theta1.clone())));
    preconditions.push(contraction(alpha));
    Ok(RateCertificate {
        name: "phi".into(),
        modulus: Modulus::monotone(label, phi),
        residual_kind: ResidualKind::Successive,
        provenance: format!(
            "rate of asymptotic regularity with errors: χ(k) = max{{σ2(6K(k+1)-1), γ1(6K(k+1)-1), θ1(6k+5)}}, \
             Φ(k) = σ1(⌈(χ(2k+1)+1+⌈ln(4K(k+1))⌉)/(1-α)⌉+1); inputs K = {kz}, α = {alpha}, \
             σ1 = {}, σ2 = {}, {} = {}, θ1 = {}",
            sigma1.label(),
            sigma2.label(),
            gamma1.describe(),
            gamma1.modulus().label(),
            theta1.label()
        ),
        preconditions,
        uniform_in_m: false,
    })
}

fn require_kind(cert: &RateCertificate, kind: ResidualKind, what: &str) -> Result<(), RateError> {
    if cert.residual_kind != kind {
        return Err(RateError::Domain(format!(
            "{what} needs a certificate for the {kind} residual, got {} ({})",
            cert.residual_kind, cert.name
        )));
    }
    Ok(())
}

/// `Ψ(k) = max{σ3(6K(k+1)-1), Φ(3k+2), θ2(3k+2)}`, a rate for
/// `‖x_n - J_{λ_n} x_n‖ → 0`.
pub fn psi_rate(phi: &RateCertificate, sigma3: &Modulus, theta2: &Modulus, kz: u64) -> Result<RateCertificate, RateError> {
    require_kind(phi, ResidualKind::Successive, "Ψ")?;
    if kz == 0 {
        return Err(RateError::Domain("K must be a positive natural".into()));
    }
    let (s3, p, t2) = (sigma3.clone(), phi.modulus.clone(), theta2.clone());
    let psi = Modulus::monotone(format!("Ψ[K={kz}]"), move |k| {
        let a = Nat::new(3) * k + 2;
        s3.at(scaled_arg(6, kz, k)).max(p.at(a)).max(t2.at(a))
    });
    let mut preconditions = phi.preconditions.clone();
    preconditions.push(vanishing(Hypothesis::AlphaVanishing, SeqRef::Alpha, sigma3));
    preconditions.push(vanishing(Hypothesis::ErrorsVanish, SeqRef::ErrorNorm, theta2));
    Ok(RateCertificate {
        name: "psi".into(),
        modulus: psi,
        residual_kind: ResidualKind::Scheme,
        provenance: format!(
            "rate for |x_n - J_(λ_n) x_n| -> 0: Ψ(k) = max{{σ3(6K(k+1)-1), Φ(3k+2), θ2(3k+2)}}; \
             inputs K = {kz}, σ3 = {}, θ2 = {}, Φ from [{}]",
            sigma3.label(),
            theta2.label(),
            phi.name
        ),
        preconditions,
        uniform_in_m: false,
    })
}

fn theta_from(
    psi: &RateCertificate,
    bound: LambdaLowerBound,
    lambda_m: u64,
    m: u64,
    name: &str,
    symbol: &str,
) -> Result<RateCertificate, RateError> {
    require_kind(psi, ResidualKind::Scheme, symbol)?;
    if bound.lambda == 0 || lambda_m == 0 {
        return Err(RateError::Domain("Λ and Λ_m must be positive naturals".into()));
    }
    let p = psi.modulus.clone();
    let (l, n) = (bound.lambda, Nat::new(bound.from));
    let theta = Modulus::monotone(format!("{symbol}_{m}[Λ={l}, N={}, Λ_m={lambda_m}]", bound.from), move |k| {
        let kk = Nat::new(k);
        let a = (Nat::new(lambda_m) * l * (kk + 1)).pred();
        n.max(p.at(a)).max(p.at(kk * 2 + 1))
    });
    let mut preconditions = psi.preconditions.clone();
    preconditions.push(lower_bound_claim(bound));
    preconditions.push(Precondition::new(Hypothesis::LambdaAtM, Claim::LambdaAtM { m, bound: lambda_m }));
    Ok(RateCertificate {
        name: format!("{name}_m{m}"),
        modulus: theta,
        residual_kind: ResidualKind::Fixed(m),
        provenance: format!(
            "rate for |x_n - J_(λ_m) x_n| -> 0: {symbol}_m(k) = max{{N, Ψ(Λ_m Λ(k+1)-1), Ψ(2k+1)}}; \
             inputs m = {m}, Λ = {l}, N = {}, Λ_m = {lambda_m}, Ψ from [{}]",
            bound.from, psi.name
        ),
        preconditions,
        uniform_in_m: false,
    })
}

/// `Θ_m(k) = max{N_Λ, Ψ(Λ_m Λ(k+1) - 1), Ψ(2k+1)}`.
pub fn theta_m_rate(psi: &RateCertificate, bound: LambdaLowerBound, lambda_m: u64, m: u64) -> Result<RateCertificate, RateError> {
    theta_from(psi, bound, lambda_m, m, "theta", "Θ")
}

/// The error-free rate `Φ*`:
/// `χ*(k) = max{σ2(4K(k+1)-1), γ1(4K(k+1)-1)}`,
/// `Φ*(k) = σ1(⌈(χ*(2k+1) + 1 + ⌈ln(4K(k+1))⌉)/(1-α)⌉ + 1)`.
pub fn phi_star_rate(
    sigma1: &Modulus,
    sigma2: &Modulus,
    gamma1: &LambdaModulus,
    kz: u64,
    alpha: f64,
) -> Result<RateCertificate, RateError> {
    check_inputs(kz, alpha)?;
    let (s2, g1) = (sigma2.clone(), gamma1.modulus());
    let chi = Modulus::monotone("χ*", move |k| {
        let a = scaled_arg(4, kz, k);
        s2.at(a).max(g1.at(a))
    });
    let phi = outer_phi(sigma1.clone(), chi, kz, alpha);
    let mut preconditions = vec![
        Precondition::new(
            Hypothesis::AlphaDivergence,
            Claim::Divergence {
                seq: SeqRef::Alpha,
                modulus: sigma1.clone(),
            },
        ),
        cauchy(Hypothesis::AlphaVariation, SeqRef::AlphaVariation, sigma2),
    ];
    preconditions.extend(gamma1.preconditions());
    preconditions.push(Precondition::new(Hypothesis::ErrorFree, Claim::ErrorFree));
    preconditions.push(anchor(kz, Allowance::None));
    preconditions.push(contraction(alpha));
    Ok(RateCertificate {
        name: "phi_star".into(),
        modulus: Modulus::monotone(format!("Φ*[K={kz}, α={alpha}]"), phi),
        residual_kind: ResidualKind::Successive,
        provenance: format!(
            "error-free rate of asymptotic regularity: χ*(k) = max{{σ2(4K(k+1)-1), γ1(4K(k+1)-1)}}, \
             Φ*(k) = σ1(⌈(χ*(2k+1)+1+⌈ln(4K(k+1))⌉)/(1-α)⌉+1); inputs K = {kz}, α = {alpha}, \
             σ1 = {}, σ2 = {}, {} = {}",
            sigma1.label(),
            sigma2.label(),
            gamma1.describe(),
            gamma1.modulus().label()
        ),
        preconditions,
        uniform_in_m: false,
    })
}

/// `Ψ*(k) = max{σ3(4K(k+1)-1), Φ*(2k+1)}`.
pub fn psi_star_rate(phi_star: &RateCertificate, sigma3: &Modulus, kz: u64) -> Result<RateCertificate, RateError> {
    require_kind(phi_star, ResidualKind::Successive, "Ψ*")?;
    if kz == 0 {
        return Err(RateError::Domain("K must be a positive natural".into()));
    }
    let (s3, p) = (sigma3.clone(), phi_star.modulus.clone());
    let psi = Modulus::monotone(format!("Ψ*[K={kz}]"), move |k| {
        s3.at(scaled_arg(4, kz, k)).max(p.at(Nat::new(k) * 2 + 1))
    });
    let mut preconditions = phi_star.preconditions.clone();
    preconditions.push(vanishing(Hypothesis::AlphaVanishing, SeqRef::Alpha, sigma3));
    Ok(RateCertificate {
        name: "psi_star".into(),
        modulus: psi,
        residual_kind: ResidualKind::Scheme,
        provenance: format!(
            "error-free rate for |x_n - J_(λ_n) x_n| -> 0: Ψ*(k) = max{{σ3(4K(k+1)-1), Φ*(2k+1)}}; \
             inputs K = {kz}, σ3 = {}, Φ* from [{}]",
            sigma3.label(),
            phi_star.name
        ),
        preconditions,
        uniform_in_m: false,
    })
}

/// `Θ*_m(k) = max{N_Λ, Ψ*(Λ_m Λ(k+1) - 1), Ψ*(2k+1)}`.
pub fn theta_star_m_rate(
    psi_star: &RateCertificate,
    bound: LambdaLowerBound,
    lambda_m: u64,
    m: u64,
) -> Result<RateCertificate, RateError> {
    theta_from(psi_star, bound, lambda_m, m, "theta_star", "Θ*")
}

/// `(Φ*, Ψ*, Θ*_m)` for the error-free iteration.
#[allow(clippy::too_many_arguments)]
pub fn vam_rates(
    sigma1: &Modulus,
    sigma2: &Modulus,
    gamma1: &LambdaModulus,
    sigma3: &Modulus,
    kz_star: u64,
    alpha: f64,
    bound: LambdaLowerBound,
    lambda_m: u64,
    m: u64,
) -> Result<(RateCertificate, RateCertificate, RateCertificate), RateError> {
    let phi = phi_star_rate(sigma1, sigma2, gamma1, kz_star, alpha)?;
    let psi = psi_star_rate(&phi, sigma3, kz_star)?;
    let theta = theta_star_m_rate(&psi, bound, lambda_m, m)?;
    Ok((phi, psi, theta))
}

fn linear_modulus(label: String, slope: Nat, offset: u64) -> Modulus {
    Modulus::monotone(label, move |k| slope * (Nat::new(k) + 1) - offset)
}

/// `Φ0(k) = 4K c²(k+1) - 2c` and `Ψ0(k) = (4K c² + 4K c)(k+1) - 2c`, with
/// `c = ⌈1/(1-α)⌉`, for `α_n = 2/((1-α)(n+J))`, constant `λ` and no errors.
/// `Ψ0` also bounds `‖x_n - J_{λ_m} x_n‖` for every `m`.
pub fn linear_rates_example1(kz_star: u64, alpha: f64) -> Result<(RateCertificate, RateCertificate), RateError> {
    check_inputs(kz_star, alpha)?;
    let c = inverse_gap_ceil(alpha);
    let kc2 = Nat::new(4) * kz_star * c * c;
    let kc = Nat::new(4) * kz_star * c;
    let pre = vec![
        Precondition::new(Hypothesis::ScheduleShape, Claim::Linear(LinearFamily::First { alpha })),
        anchor(kz_star, Allowance::None),
        contraction(alpha),
    ];
    let inputs = format!("inputs K = {kz_star}, α = {alpha}, c = ⌈1/(1-α)⌉ = {c}");
    let phi = RateCertificate {
        name: "phi0".into(),
        modulus: linear_modulus(format!("{kc2}(k+1)-{}", 2 * c), kc2, 2 * c),
        residual_kind: ResidualKind::Successive,
        provenance: format!("linear rate of asymptotic regularity, constant step size: Φ0(k) = 4Kc²(k+1) - 2c; {inputs}"),
        preconditions: pre.clone(),
        uniform_in_m: false,
    };
    let slope = kc2 + kc;
    let psi = RateCertificate {
        name: "psi0".into(),
        modulus: linear_modulus(format!("{slope}(k+1)-{}", 2 * c), slope, 2 * c),
        residual_kind: ResidualKind::Scheme,
        provenance: format!("linear rate for |x_n - J_λ x_n| -> 0, constant step size: Ψ0(k) = (4Kc² + 4Kc)(k+1) - 2c; {inputs}"),
        preconditions: pre,
        uniform_in_m: true,
    };
    Ok((phi, psi))
}

/// `‖x_{n+1} - x_n‖ <= (3JK + ‖e*‖)/((1-α)(n+J))` for the second linear family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBound {
    pub j: u64,
    pub kz: u64,
    pub alpha: f64,
    pub e_star_norm: f64,
}

impl LinearBound {
    pub fn eval(&self, n: u64) -> f64 {
        let j = self.j as f64;
        (3.0 * j * self.kz as f64 + self.e_star_norm) / ((1.0 - self.alpha) * (n as f64 + j))
    }
}

/// The three linear rates for `α_n = 2/((1-α)(n+J))`,
/// `λ_n = (n+J)/(n+J-1)`, `e_n = e*/(n+J)²`, with `c = ⌈1/(1-α)⌉`, `J = 2c`
/// and `ε = ⌈‖e*‖⌉`:
///
/// `Φ0(k) = (3JK + ε)c(k+1) - J`,
/// `Ψ0(k) = 18Kc²(k+1) + 3εc(k+1) - 2c`,
/// `Θ0(k) = 36Kc²(k+1) + 6εc(k+1) - 2c`, for every `m` at once.
///
/// `kz` has to dominate `max{‖x0 - z‖, ‖f(z) - z‖/(1-α)} + ⌈‖e*‖/(J-1)⌉`.
pub fn linear_rates_example2(
    kz: u64,
    alpha: f64,
    e_star_norm: f64,
) -> Result<(RateCertificate, RateCertificate, RateCertificate, LinearBound), RateError> {
    check_inputs(kz, alpha)?;
    if !(e_star_norm >= 0.0 && e_star_norm.is_finite()) {
        return Err(RateError::Domain(format!("|e*| = {e_star_norm} must be a nonnegative real")));
    }
    let c = inverse_gap_ceil(alpha);
    let j = linear_offset(alpha);
    let eps = Nat::ceil_f64(e_star_norm);
    let allowance = Nat::ceil_f64(e_star_norm / (j as f64 - 1.0)).get();
    let pre = vec![
        Precondition::new(
            Hypothesis::ScheduleShape,
            Claim::Linear(LinearFamily::Second { alpha, e_star_norm }),
        ),
        anchor(kz, Allowance::Fixed(allowance)),
        contraction(alpha),
    ];
    let inputs = format!("inputs K = {kz}, α = {alpha}, |e*| = {e_star_norm}, c = {c}, J = {j}");
    let phi_slope = (Nat::new(3) * j * kz + eps) * c;
    let psi_slope = Nat::new(18) * kz * c * c + Nat::new(3) * eps * c;
    let theta_slope = Nat::new(36) * kz * c * c + Nat::new(6) * eps * c;
    let phi = RateCertificate {
        name: "phi0".into(),
        modulus: linear_modulus(format!("{phi_slope}(k+1)-{j}"), phi_slope, j),
        residual_kind: ResidualKind::Successive,
        provenance: format!("linear rate of asymptotic regularity with errors: Φ0(k) = (3JK + ⌈|e*|⌉)c(k+1) - J; {inputs}"),
        preconditions: pre.clone(),
        uniform_in_m: false,
    };
    let psi = RateCertificate {
        name: "psi0".into(),
        modulus: linear_modulus(format!("{psi_slope}(k+1)-{}", 2 * c), psi_slope, 2 * c),
        residual_kind: ResidualKind::Scheme,
        provenance: format!("linear rate for |x_n - J_(λ_n) x_n| -> 0: Ψ0(k) = 18Kc²(k+1) + 3⌈|e*|⌉c(k+1) - 2c; {inputs}"),
        preconditions: pre.clone(),
        uniform_in_m: false,
    };
    let theta = RateCertificate {
        name: "theta0".into(),
        modulus: linear_modulus(format!("{theta_slope}(k+1)-{}", 2 * c), theta_slope, 2 * c),
        residual_kind: ResidualKind::Fixed(0),
        provenance: format!(
            "linear rate for |x_n - J_(λ_m) x_n| -> 0, every m: Θ0(k) = 36Kc²(k+1) + 6⌈|e*|⌉c(k+1) - 2c; {inputs}"
        ),
        preconditions: pre,
        uniform_in_m: true,
    };
    let bound = LinearBound {
        j,
        kz,
        alpha,
        e_star_norm,
    };
    Ok((phi, psi, theta, bound))
}
