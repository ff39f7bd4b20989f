//! The viscosity iteration with error terms
//!
//! `x_{n+1} = α_n f(x_n) + (1 - α_n) J_{λ_n} x_n + e_n`,
//!
//! its recorded trajectories, and checks of the a priori bounds every
//! trajectory satisfies.

mod checks;
mod schedule;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;

use thiserror::Error;

use crate::operators::{ContractionMap, OperatorError, Point, ResolventOperator};

pub use checks::{check_bound_lemma, check_kz_bounded, check_main_inequality, RatioVariant, TraceCheck};
pub use schedule::{
    inverse_gap_ceil, linear_offset, AlphaSchedule, ErrorSchedule, LambdaLowerBound,
    LambdaSchedule, ParamSchedule, ScheduleModuli,
};

#[derive(Debug, Error)]
pub enum IterationError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o failed: {0}")]
    Io(#[from] std::io::Error),
}

/// A recorded trajectory `x_0, ..., x_N` with everything needed to check it.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    points: Vec<Point>,
    alphas: Vec<f64>,
    lambdas: Vec<f64>,
    errors: Vec<Point>,
    successive: Vec<f64>,
    scheme: Vec<f64>,
    kz: Option<Vec<f64>>,
    operator: ResolventOperator,
    contraction: ContractionMap,
    schedule: ParamSchedule,
    seed: Option<u64>,
}

/// Runs `n_max` steps from `x0`.
pub fn run_vame(
    x0: &Point,
    op: &ResolventOperator,
    f: &ContractionMap,
    sched: &ParamSchedule,
    n_max: u64,
) -> Result<IterationTrace, IterationError> {
    let dim = op.dim();
    x0.expect_dim(dim)?;
    if f.dim() != dim {
        return Err(OperatorError::DimensionMismatch {
            expected: dim,
            got: f.dim(),
        }
        .into());
    }
    if n_max < 1 {
        return Err(IterationError::Domain("at least one step is required".into()));
    }
    sched.validate(dim)?;
    let len = n_max as usize + 1;
    let mut points = Vec::with_capacity(len);
    let mut alphas = Vec::with_capacity(len);
    let mut lambdas = Vec::with_capacity(len);
    let mut errors = Vec::with_capacity(len);
    let mut successive = Vec::with_capacity(len - 1);
    let mut scheme = Vec::with_capacity(len);
    let mut x = x0.clone();
    for n in 0..=n_max {
        let a = sched.alpha_at(n);
        let l = sched.lambda_at(n);
        if !(0.0..=1.0).contains(&a) {
            return Err(IterationError::Schedule(format!("alpha_{n} = {a} lies outside [0, 1]")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(IterationError::Schedule(format!("lambda_{n} = {l} is not positive")));
        }
        let e = sched.error_at(n, dim);
        let jx = op.resolvent(l, &x)?;
        scheme.push(x.dist(&jx));
        if n < n_max {
            let fx = f.apply(&x)?;
            let (fx, jx, ec) = (fx.coords(), jx.coords(), e.coords());
            let next: Vec<f64> = (0..dim)
                .map(|i| a * fx[i] + (1.0 - a) * jx[i] + ec[i])
                .collect();
            let next = Point::new(next).map_err(|err| {
                IterationError::Domain(format!("iterate {} is not finite: {err}", n + 1))
            })?;
            successive.push(next.dist(&x));
            points.push(std::mem::replace(&mut x, next));
        } else {
            points.push(x.clone());
        }
        alphas.push(a);
        lambdas.push(l);
        errors.push(e);
    }
    let mut trace = IterationTrace {
        points,
        alphas,
        lambdas,
        errors,
        successive,
        scheme,
        kz: None,
        operator: op.clone(),
        contraction: f.clone(),
        schedule: sched.clone(),
        seed: None,
    };
    if let Some(z) = op.known_zero() {
        trace.kz = Some(kz_sequence(&trace, z)?);
    }
    Ok(trace)
}

/// `K_{z,0} = max{‖x_0 - z‖, ‖f(z) - z‖/(1-α)}`, `K_{z,n+1} = K_{z,n} + ‖e_n‖`.
pub fn kz_sequence(trace: &IterationTrace, z: &Point) -> Result<Vec<f64>, IterationError> {
    z.expect_dim(trace.dim())?;
    let alpha = trace.contraction.alpha();
    if !(alpha < 1.0) {
        return Err(IterationError::Domain(format!("contraction constant {alpha} is not below 1")));
    }
    let fz = trace.contraction.apply(z)?;
    let mut k = trace.points[0].dist(z).max(fz.dist(z) / (1.0 - alpha));
    let mut out = Vec::with_capacity(trace.points.len());
    out.push(k);
    for e in &trace.errors[..trace.points.len() - 1] {
        k += e.norm();
        out.push(k);
    }
    Ok(out)
}

impl IterationTrace {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn horizon(&self) -> u64 {
        self.points.len() as u64 - 1
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn errors(&self) -> &[Point] {
        &self.errors
    }

    /// `‖x_{n+1} - x_n‖` for `n < N`.
    pub fn successive_residuals(&self) -> &[f64] {
        &self.successive
    }

    /// `‖x_n - J_{λ_n} x_n‖` for `n <= N`.
    pub fn scheme_residuals(&self) -> &[f64] {
        &self.scheme
    }

    /// `K_{z,n}` for the operator's declared zero, when it has one.
    pub fn kz(&self) -> Option<&[f64]> {
        self.kz.as_deref()
    }

    pub fn operator(&self) -> &ResolventOperator {
        &self.operator
    }

    pub fn contraction(&self) -> &ContractionMap {
        &self.contraction
    }

    pub fn schedule(&self) -> &ParamSchedule {
        &self.schedule
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `‖x_n - J_{λ_m} x_n‖` for `n <= N`.
    pub fn fixed_residuals(&self, m: u64) -> Result<Vec<f64>, IterationError> {
        let l = self.schedule.lambda_at(m);
        self.points
            .iter()
            .map(|x| Ok(self.operator.resolvent(l, x)?.dist(x)))
            .collect()
    }

    /// Identifies the configuration: labels, start point, horizon and seed.
    pub fn fingerprint(&self) -> String {
        let mut h = DefaultHasher::new();
        for v in self.points[0].coords() {
            v.to_bits().hash(&mut h);
        }
        format!(
            "{} | {} | {} | x0#{:016x} | N={} | seed={}",
            self.operator.label(),
            self.contraction.label(),
            self.schedule.label,
            h.finish(),
            self.horizon(),
            self.seed.map_or_else(|| "none".to_string(), |s| s.to_string()),
        )
    }

    /// Overwrites `x_n` and refreshes the residuals that depend on it. Only
    /// useful for building corrupted trajectories.
    pub fn replace_point(&mut self, n: usize, p: Point) -> Result<(), IterationError> {
        if n >= self.points.len() {
            return Err(IterationError::Domain(format!("index {n} beyond the trace")));
        }
        p.expect_dim(self.dim())?;
        let jx = self.operator.resolvent(self.lambdas[n], &p)?;
        self.scheme[n] = p.dist(&jx);
        self.points[n] = p;
        if n > 0 {
            self.successive[n - 1] = self.points[n].dist(&self.points[n - 1]);
        }
        if n + 1 < self.points.len() {
            self.successive[n] = self.points[n + 1].dist(&self.points[n]);
        }
        if n == 0 {
            if let Some(z) = self.operator.known_zero().cloned() {
                self.kz = Some(kz_sequence(self, &z)?);
            }
        }
        Ok(())
    }

    /// Writes one row per index with columns
    /// `n, alpha_n, lambda_n, err_norm, succ_residual, scheme_residual, kz`.
    /// Cells with no value (the last successive residual, `kz` without a
    /// known zero) are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), IterationError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "n",
            "alpha_n",
            "lambda_n",
            "err_norm",
            "succ_residual",
            "scheme_residual",
            "kz",
        ])?;
        for n in 0..self.points.len() {
            let succ = self.successive.get(n).map(f64::to_string).unwrap_or_default();
            let kz = self
                .kz
                .as_ref()
                .map(|k| k[n].to_string())
                .unwrap_or_default();
            w.write_record([
                n.to_string(),
                self.alphas[n].to_string(),
                self.lambdas[n].to_string(),
                self.errors[n].norm().to_string(),
                succ,
                self.scheme[n].to_string(),
                kz,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
