//! Parameter sequences `(α_n)`, `(λ_n)`, `(e_n)` and the moduli describing
//! their quantitative behaviour.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::moduli::{
    brute_cauchy_modulus, brute_divergence_rate, brute_rate_of_convergence, ceil_div_gap, Modulus,
    Nat,
};
use crate::operators::Point;
use crate::rates::derive_gamma1;

use super::IterationError;

/// `⌈x⌉` nudged upwards by a relative `1e-12`, so that float error in `x`
/// can only enlarge the resulting index.
fn ceil_up(x: f64) -> Nat {
    Nat::ceil_f64(x + 1e-12 * x.abs().max(1.0))
}

/// `⌈1/(1-α)⌉` for the float `α`.
pub fn inverse_gap_ceil(alpha: f64) -> u64 {
    ceil_div_gap(Nat::ONE, alpha).get()
}

/// `J = 2⌈1/(1-α)⌉`.
pub fn linear_offset(alpha: f64) -> u64 {
    2 * inverse_gap_ceil(alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSchedule {
    /// `α_n = a / (n + b)^p` with `p ∈ [0, 1]`.
    Power { a: f64, b: f64, p: f64 },
    /// `α_n = 2 / ((1 - alpha)(n + J))` with `J = 2⌈1/(1 - alpha)⌉`.
    LinearExample { alpha: f64, j: u64 },
}

impl AlphaSchedule {
    pub fn power(a: f64, b: f64, p: f64) -> Result<Self, IterationError> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(IterationError::Schedule(format!("alpha offset b = {b} must be positive")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(IterationError::Schedule(format!("alpha exponent p = {p} must lie in [0, 1]")));
        }
        if !(a > 0.0 && a <= b.powf(p)) {
            return Err(IterationError::Schedule(format!(
                "alpha scale a = {a} must lie in (0, b^p] so that alpha_n stays in [0, 1]"
            )));
        }
        Ok(AlphaSchedule::Power { a, b, p })
    }

    pub fn linear_example(alpha: f64) -> Result<Self, IterationError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(IterationError::Schedule(format!("contraction constant {alpha} must lie in [0, 1)")));
        }
        Ok(AlphaSchedule::LinearExample {
            alpha,
            j: linear_offset(alpha),
        })
    }

    pub fn value(&self, n: u64) -> f64 {
        match *self {
            AlphaSchedule::Power { a, b, p } => a / (n as f64 + b).powf(p),
            AlphaSchedule::LinearExample { alpha, j } => 2.0 / ((1.0 - alpha) * (n + j) as f64),
        }
    }

    /// Rate of divergence of `Σ α_n`, from `Σ_{i<=m} α_i >= ∫_0^{m+1} α`.
    pub fn sigma1(&self) -> Modulus {
        match *self {
            AlphaSchedule::Power { a, b, p } if p < 1.0 => {
                let q = 1.0 - p;
                Modulus::monotone(format!("σ1[{a}/(n+{b})^{p}]"), move |n| {
                    let t = (n as f64 * q / a + b.powf(q)).powf(1.0 / q);
                    ceil_up(t - b).pred()
                })
            }
            AlphaSchedule::Power { a, b, .. } => {
                Modulus::monotone(format!("σ1[{a}/(n+{b})]"), move |n| {
                    ceil_up(b * (n as f64 / a).exp() - b).pred()
                })
            }
            AlphaSchedule::LinearExample { alpha, j } => {
                let jf = j as f64;
                Modulus::monotone(format!("σ1[2/((1-{alpha})(n+{j}))]"), move |n| {
                    ceil_up(jf * (n as f64 * (1.0 - alpha) / 2.0).exp() - jf).pred()
                })
            }
        }
    }

    /// Cauchy modulus of `Σ |α_n - α_{n+1}|`; the tail past `n` telescopes to
    /// at most `α_{n+1}`.
    pub fn sigma2(&self) -> Modulus {
        match *self {
            AlphaSchedule::Power { p: 0.0, .. } => Modulus::zero(),
            AlphaSchedule::Power { a, b, p } => {
                Modulus::monotone(format!("σ2[{a}/(n+{b})^{p}]"), move |k| {
                    ceil_up((a * (k as f64 + 1.0)).powf(1.0 / p) - b).pred()
                })
            }
            AlphaSchedule::LinearExample { alpha, j } => {
                Modulus::monotone(format!("σ2[2/((1-{alpha})(n+{j}))]"), move |k| {
                    ceil_up(2.0 * (k as f64 + 1.0) / (1.0 - alpha) - j as f64).pred()
                })
            }
        }
    }

    /// Rate of convergence of `α_n → 0`; absent for constant schedules.
    pub fn sigma3(&self) -> Option<Modulus> {
        match *self {
            AlphaSchedule::Power { p: 0.0, .. } => None,
            AlphaSchedule::Power { a, b, p } => Some(Modulus::monotone(
                format!("σ3[{a}/(n+{b})^{p}]"),
                move |k| ceil_up((a * (k as f64 + 1.0)).powf(1.0 / p) - b),
            )),
            AlphaSchedule::LinearExample { j, .. } => {
                Some(Modulus::monotone(format!("{j}k"), move |k| Nat::new(j) * k))
            }
        }
    }

    fn label(&self) -> String {
        match self {
            AlphaSchedule::Power { a, b, p } => format!("alpha_n={a}/(n+{b})^{p}"),
            AlphaSchedule::LinearExample { alpha, j } => format!("alpha_n=2/((1-{alpha})(n+{j}))"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSchedule {
    Constant(f64),
    /// `λ_n = base + amp / (n + offset)`.
    Decaying { base: f64, amp: f64, offset: f64 },
    /// `λ_n = (n + J) / (n + J - 1)`.
    LinearExample { j: u64 },
}

/// Bounds attached to a step-size schedule: `λ_n >= 1/Λ` for `n >= N_Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaLowerBound {
    pub lambda: u64,
    pub from: u64,
}

impl LambdaSchedule {
    pub fn constant(lambda: f64) -> Result<Self, IterationError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(IterationError::Schedule(format!("step lambda = {lambda} must be positive")));
        }
        Ok(LambdaSchedule::Constant(lambda))
    }

    pub fn decaying(base: f64, amp: f64, offset: f64) -> Result<Self, IterationError> {
        if !(base > 0.0 && base.is_finite() && amp >= 0.0 && amp.is_finite() && offset > 0.0) {
            return Err(IterationError::Schedule(format!(
                "decaying step needs base > 0, amp >= 0, offset > 0 (got {base}, {amp}, {offset})"
            )));
        }
        Ok(LambdaSchedule::Decaying { base, amp, offset })
    }

    pub fn linear_example(j: u64) -> Result<Self, IterationError> {
        if j < 2 {
            return Err(IterationError::Schedule(format!("offset J = {j} must be at least 2")));
        }
        Ok(LambdaSchedule::LinearExample { j })
    }

    pub fn value(&self, n: u64) -> f64 {
        match *self {
            LambdaSchedule::Constant(l) => l,
            LambdaSchedule::Decaying { base, amp, offset } => base + amp / (n as f64 + offset),
            LambdaSchedule::LinearExample { j } => (n + j) as f64 / (n + j - 1) as f64,
        }
    }

    /// Cauchy modulus of `Σ |λ_n - λ_{n+1}|`.
    pub fn gamma3(&self) -> Modulus {
        match *self {
            LambdaSchedule::Constant(_) => Modulus::zero(),
            LambdaSchedule::Decaying { amp, offset, .. } => {
                Modulus::monotone(format!("γ3[{amp}/(n+{offset})]"), move |k| {
                    ceil_up(amp * (k as f64 + 1.0) - 1.0 - offset)
                })
            }
            LambdaSchedule::LinearExample { j } => linear_lambda_modulus(j),
        }
    }

    pub fn lower_bound(&self) -> LambdaLowerBound {
        let lambda = match *self {
            LambdaSchedule::Constant(l) => inverse_ceil(l),
            LambdaSchedule::Decaying { base, .. } => inverse_ceil(base),
            LambdaSchedule::LinearExample { .. } => 1,
        };
        LambdaLowerBound {
            lambda: lambda.max(1),
            from: 0,
        }
    }

    /// A positive natural `Λ_m >= λ_m`.
    pub fn upper_at(&self, m: u64) -> u64 {
        match *self {
            LambdaSchedule::LinearExample { .. } => 2,
            _ => ceil_up_exact(self.value(m)).max(1),
        }
    }

    fn label(&self) -> String {
        match self {
            LambdaSchedule::Constant(l) => format!("lambda_n={l}"),
            LambdaSchedule::Decaying { base, amp, offset } => {
                format!("lambda_n={base}+{amp}/(n+{offset})")
            }
            LambdaSchedule::LinearExample { j } => format!("lambda_n=(n+{j})/(n+{j}-1)"),
        }
    }
}

/// `⌈x⌉` with a final check that the result really is `>= x`.
fn ceil_up_exact(x: f64) -> u64 {
    let c = x.ceil();
    let c = if c < x { c + 1.0 } else { c };
    Nat::ceil_f64(c).get()
}

/// The least natural `c` with `c · x >= 1` exactly, for `x > 0`.
fn inverse_ceil(x: f64) -> u64 {
    let mut c = (1.0 / x).ceil();
    while c.mul_add(x, -1.0) < 0.0 {
        c += 1.0;
    }
    while c > 1.0 && (c - 1.0).mul_add(x, -1.0) >= 0.0 {
        c -= 1.0;
    }
    Nat::ceil_f64(c).get()
}

/// `k ↦ max(0, k + 1 - J)`: the tails of `Σ 1/(n+J)^2` and of the two
/// telescoping step series of the second linear example are all below
/// `1/(n+J)`.
fn linear_lambda_modulus(j: u64) -> Modulus {
    Modulus::monotone(format!("max(0, k+1-{j})"), move |k| Nat::new(k) + 1 - j)
}

#[derive(Clone)]
pub enum ErrorSchedule {
    Zero,
    /// `e_n = e* / (n + J)^2`.
    InverseSquare { e_star: Point, j: u64 },
    /// `e_n = scale · u_n / (n + 1)^2` with `u_n` a seeded random unit vector.
    RandomInverseSquare { scale: f64, dim: usize, seed: u64 },
    /// `e_n = e* / (n + 1)`. Not summable.
    Harmonic { e_star: Point },
}

impl fmt::Debug for ErrorSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl ErrorSchedule {
    pub fn value(&self, n: u64, dim: usize) -> Point {
        match self {
            ErrorSchedule::Zero => Point::zeros(dim),
            ErrorSchedule::InverseSquare { e_star, j } => {
                let d = ((n + j) as f64).powi(2);
                Point::from_raw(e_star.coords().iter().map(|e| e / d).collect())
            }
            ErrorSchedule::RandomInverseSquare { scale, dim, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(n);
                let mut u: Vec<f64> = (0..*dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                let c = scale / ((n as f64 + 1.0).powi(2) * norm);
                u.iter_mut().for_each(|v| *v *= c);
                Point::from_raw(u)
            }
            ErrorSchedule::Harmonic { e_star } => {
                let d = n as f64 + 1.0;
                Point::from_raw(e_star.coords().iter().map(|e| e / d).collect())
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ErrorSchedule::Zero => None,
            ErrorSchedule::InverseSquare { e_star, .. } | ErrorSchedule::Harmonic { e_star } => {
                Some(e_star.dim())
            }
            ErrorSchedule::RandomInverseSquare { dim, .. } => Some(*dim),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ErrorSchedule::Zero => true,
            ErrorSchedule::InverseSquare { e_star, .. } | ErrorSchedule::Harmonic { e_star } => {
                e_star.norm() == 0.0
            }
            ErrorSchedule::RandomInverseSquare { scale, .. } => *scale == 0.0,
        }
    }

    /// Cauchy modulus of `Σ ‖e_n‖`. For the harmonic family this is the
    /// formula one would get by mistaking it for a summable one; it is false.
    pub fn theta1(&self) -> Modulus {
        match self {
            ErrorSchedule::Zero => Modulus::zero(),
            ErrorSchedule::InverseSquare { e_star, j } => {
                let (norm, j) = (e_star.norm(), *j);
                Modulus::monotone(format!("max(0, ⌈{norm}(k+1)⌉-{j})"), move |k| {
                    ceil_up(norm * (k as f64 + 1.0)) - j
                })
            }
            ErrorSchedule::RandomInverseSquare { scale, .. } => {
                let s = *scale;
                Modulus::monotone(format!("max(0, ⌈{s}(k+1)⌉-1)"), move |k| {
                    ceil_up(s * (k as f64 + 1.0)).pred()
                })
            }
            ErrorSchedule::Harmonic { e_star } => {
                let norm = e_star.norm();
                Modulus::monotone(format!("⌈{norm}(k+1)⌉-1"), move |k| {
                    ceil_up(norm * (k as f64 + 1.0)).pred()
                })
            }
        }
    }

    /// Rate of convergence of `‖e_n‖ → 0`.
    pub fn theta2(&self) -> Modulus {
        match self {
            ErrorSchedule::Zero => Modulus::zero(),
            ErrorSchedule::InverseSquare { e_star, j } => {
                let (norm, j) = (e_star.norm(), *j);
                Modulus::monotone(format!("max(0, ⌈√({norm}(k+1))⌉-{j})"), move |k| {
                    ceil_up((norm * (k as f64 + 1.0)).sqrt()) - j
                })
            }
            ErrorSchedule::RandomInverseSquare { scale, .. } => {
                let s = *scale;
                Modulus::monotone(format!("max(0, ⌈√({s}(k+1))⌉-1)"), move |k| {
                    ceil_up((s * (k as f64 + 1.0)).sqrt()).pred()
                })
            }
            ErrorSchedule::Harmonic { e_star } => {
                let norm = e_star.norm();
                Modulus::monotone(format!("⌈{norm}(k+1)⌉-1"), move |k| {
                    ceil_up(norm * (k as f64 + 1.0)).pred()
                })
            }
        }
    }

    /// A positive natural bounding `Σ ‖e_n‖`.
    pub fn sum_bound(&self) -> u64 {
        let total = match self {
            ErrorSchedule::Zero => 0.0,
            // Σ 1/(n+J)^2 < 1/(J-1).
            ErrorSchedule::InverseSquare { e_star, j } => e_star.norm() / (*j as f64 - 1.0),
            ErrorSchedule::RandomInverseSquare { scale, .. } => scale * std::f64::consts::PI.powi(2) / 6.0,
            // The claim one would make by mistake.
            ErrorSchedule::Harmonic { e_star } => e_star.norm() + 1.0,
        };
        ceil_up(total).get().max(1)
    }

    fn label(&self) -> String {
        match self {
            ErrorSchedule::Zero => "e_n=0".into(),
            ErrorSchedule::InverseSquare { e_star, j } => {
                format!("e_n=e*/(n+{j})^2, |e*|={}", e_star.norm())
            }
            ErrorSchedule::RandomInverseSquare { scale, seed, .. } => {
                format!("e_n={scale}u_n/(n+1)^2, seed={seed}")
            }
            ErrorSchedule::Harmonic { e_star } => format!("e_n=e*/(n+1), |e*|={}", e_star.norm()),
        }
    }
}

/// Moduli attached to a schedule. A missing entry means no modulus is known
/// for that hypothesis.
#[derive(Clone, Debug, Default)]
pub struct ScheduleModuli {
    pub sigma1: Option<Modulus>,
    pub sigma2: Option<Modulus>,
    pub sigma3: Option<Modulus>,
    pub gamma1: Option<Modulus>,
    pub gamma1_star: Option<Modulus>,
    pub gamma3: Option<Modulus>,
    pub lambda_bound: Option<LambdaLowerBound>,
    pub theta1: Option<Modulus>,
    pub theta2: Option<Modulus>,
    pub error_bound: Option<u64>,
    /// `Some(H)` when the moduli were read off the first `H + 1` terms only.
    pub horizon_limited: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ParamSchedule {
    pub alpha: AlphaSchedule,
    pub lambda: LambdaSchedule,
    pub error: ErrorSchedule,
    pub moduli: Option<ScheduleModuli>,
    pub label: String,
}

impl ParamSchedule {
    pub fn new(alpha: AlphaSchedule, lambda: LambdaSchedule, error: ErrorSchedule) -> Self {
        let label = format!("{}; {}; {}", alpha.label(), lambda.label(), error.label());
        ParamSchedule {
            alpha,
            lambda,
            error,
            moduli: None,
            label,
        }
    }

    /// `α_n = 2/((1-α)(n+J))`, constant `λ`, no errors.
    pub fn example1(alpha: f64, lambda: f64) -> Result<Self, IterationError> {
        Ok(ParamSchedule::new(
            AlphaSchedule::linear_example(alpha)?,
            LambdaSchedule::constant(lambda)?,
            ErrorSchedule::Zero,
        )
        .with_closed_form_moduli())
    }

    /// `α_n = 2/((1-α)(n+J))`, `λ_n = (n+J)/(n+J-1)`, `e_n = e*/(n+J)^2`.
    pub fn example2(alpha: f64, e_star: Point) -> Result<Self, IterationError> {
        let a = AlphaSchedule::linear_example(alpha)?;
        let AlphaSchedule::LinearExample { j, .. } = a else {
            unreachable!()
        };
        let error = ErrorSchedule::InverseSquare { e_star, j };
        Ok(ParamSchedule::new(a, LambdaSchedule::linear_example(j)?, error).with_closed_form_moduli())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attaches the closed-form moduli of each component.
    pub fn with_closed_form_moduli(mut self) -> Self {
        let bound = self.lambda.lower_bound();
        let gamma3 = self.lambda.gamma3();
        let (gamma1, gamma1_star) = match self.lambda {
            LambdaSchedule::LinearExample { j } => (linear_lambda_modulus(j), linear_lambda_modulus(j)),
            _ => {
                let g = derive_gamma1(&gamma3, bound.lambda, bound.from);
                (g.clone(), g)
            }
        };
        self.moduli = Some(ScheduleModuli {
            sigma1: Some(self.alpha.sigma1()),
            sigma2: Some(self.alpha.sigma2()),
            sigma3: self.alpha.sigma3(),
            gamma1: Some(gamma1),
            gamma1_star: Some(gamma1_star),
            gamma3: Some(gamma3),
            lambda_bound: Some(bound),
            theta1: Some(self.error.theta1()),
            theta2: Some(self.error.theta2()),
            error_bound: Some(self.error.sum_bound()),
            horizon_limited: None,
        });
        self
    }

    /// Attaches the least moduli satisfying each definition on `0..=horizon`.
    pub fn with_brute_force_moduli(mut self, horizon: u64, dim: usize) -> Self {
        let n = horizon as usize;
        let alphas: Vec<f64> = (0..=n as u64 + 1).map(|i| self.alpha.value(i)).collect();
        let lambdas: Vec<f64> = (0..=n as u64 + 1).map(|i| self.lambda.value(i)).collect();
        let errs: Vec<f64> = (0..=n as u64).map(|i| self.error.value(i, dim).norm()).collect();
        let partial = |terms: Vec<f64>| -> Vec<f64> {
            let mut acc = 0.0;
            terms
                .into_iter()
                .map(|t| {
                    acc += t;
                    acc
                })
                .collect()
        };
        let diffs = |f: &dyn Fn(usize) -> f64| partial((0..=n).map(f).collect());
        let s_alpha = diffs(&|i| (alphas[i] - alphas[i + 1]).abs());
        let s_ratio = diffs(&|i| (1.0 - lambdas[i + 1] / lambdas[i]).abs());
        let s_ratio_star = diffs(&|i| (1.0 - lambdas[i] / lambdas[i + 1]).abs());
        let s_lambda = diffs(&|i| (lambdas[i] - lambdas[i + 1]).abs());
        let s_err = partial(errs.clone());
        let min_lambda = lambdas[..=n].iter().copied().fold(f64::INFINITY, f64::min);
        let sigma3 = brute_rate_of_convergence("σ3", &alphas[..=n], 0.0);
        self.moduli = Some(ScheduleModuli {
            sigma1: Some(brute_divergence_rate("σ1", &alphas[..=n])),
            sigma2: Some(brute_cauchy_modulus("σ2", &s_alpha)),
            sigma3: Some(sigma3),
            gamma1: Some(brute_cauchy_modulus("γ1", &s_ratio)),
            gamma1_star: Some(brute_cauchy_modulus("γ1*", &s_ratio_star)),
            gamma3: Some(brute_cauchy_modulus("γ3", &s_lambda)),
            lambda_bound: Some(LambdaLowerBound {
                lambda: inverse_ceil(min_lambda).max(1),
                from: 0,
            }),
            theta1: Some(brute_cauchy_modulus("θ1", &s_err)),
            theta2: Some(brute_rate_of_convergence("θ2", &errs, 0.0)),
            error_bound: Some(ceil_up(s_err.last().copied().unwrap_or(0.0)).get() + 1),
            horizon_limited: Some(horizon),
        });
        self
    }

    pub fn with_moduli(mut self, moduli: ScheduleModuli) -> Self {
        self.moduli = Some(moduli);
        self
    }

    pub fn alpha_at(&self, n: u64) -> f64 {
        self.alpha.value(n)
    }

    pub fn lambda_at(&self, n: u64) -> f64 {
        self.lambda.value(n)
    }

    pub fn error_at(&self, n: u64, dim: usize) -> Point {
        self.error.value(n, dim)
    }

    /// `Λ_m`: a positive natural `>= λ_m`.
    pub fn lambda_upper(&self, m: u64) -> u64 {
        self.lambda.upper_at(m)
    }

    pub(crate) fn validate(&self, dim: usize) -> Result<(), IterationError> {
        if let Some(d) = self.error.dim() {
            if d != dim {
                return Err(IterationError::Schedule(format!(
                    "error terms live in dimension {d}, iteration in {dim}"
                )));
            }
        }
        Ok(())
    }
}
