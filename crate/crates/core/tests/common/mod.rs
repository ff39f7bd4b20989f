//! The configuration matrix shared by the integration tests.

#![allow(dead_code)]

use std::io::Write;

use vamrate_core::iteration::{
    AlphaSchedule, ErrorSchedule, LambdaSchedule, ParamSchedule,
};
use vamrate_core::operators::{random_point, ContractionMap, Point, ResolventOperator};

pub const DIM: usize = 4;
pub const SEEDS: [u64; 3] = [1, 2, 3];

/// Writes straight to the process stdout so the line survives test capture.
pub fn report(criterion: u32, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion:>2}: {status}  {detail}");
    let _ = out.flush();
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    ScaledIdentity,
    Linear,
    Box,
    L1,
}

pub const OPS: [OpKind; 4] = [OpKind::ScaledIdentity, OpKind::Linear, OpKind::Box, OpKind::L1];

pub fn operator(kind: OpKind, dim: usize, seed: u64) -> ResolventOperator {
    match kind {
        OpKind::ScaledIdentity => ResolventOperator::scaled_identity(dim, 0.7),
        OpKind::Linear => {
            let spectrum: Vec<f64> = (0..dim).map(|i| if i == 0 { 0.0 } else { 0.5 * i as f64 }).collect();
            ResolventOperator::linear_from_spectrum(&spectrum, seed)
        }
        OpKind::Box => ResolventOperator::box_normal_cone(dim, 0.5, 1.5),
        OpKind::L1 => ResolventOperator::l1_subdifferential(dim, 0.3),
    }
    .unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Affine contraction with factor 1/2, errors on.
    Vame,
    /// Same map, no errors.
    Vam,
    /// Constant map, errors on.
    Hppa,
}

pub const SCHEMES: [Scheme; 3] = [Scheme::Vame, Scheme::Vam, Scheme::Hppa];

impl Scheme {
    pub fn has_errors(self) -> bool {
        self != Scheme::Vam
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sched {
    Example1,
    Example2,
    /// `α_n = 1/(n+2)^0.7`, decaying `λ_n`, random inverse-square errors.
    Generic,
    /// Constant `α_n = 1/2` with constant `λ`.
    ConstAlpha,
    /// Constant `α_n = 1/2` with decaying `λ_n`.
    ConstAlphaDecaying,
    /// `α_n = 0.1/√(n+1)` with constant `λ`: small enough certified indices
    /// for the rates of `‖x_n - J x_n‖`.
    SlowAlpha,
}

pub const SCHEDS: [Sched; 3] = [Sched::Example1, Sched::Example2, Sched::Generic];

#[derive(Debug, Clone)]
pub struct Config {
    pub op: OpKind,
    pub scheme: Scheme,
    pub sched: Sched,
    pub seed: u64,
}

impl Config {
    pub fn label(&self) -> String {
        format!("{:?}/{:?}/{:?}/seed {}", self.op, self.scheme, self.sched, self.seed)
    }
}

pub fn matrix(scheds: &[Sched]) -> Vec<Config> {
    let mut out = Vec::new();
    for &op in &OPS {
        for &scheme in &SCHEMES {
            for &sched in scheds {
                for &seed in &SEEDS {
                    out.push(Config { op, scheme, sched, seed });
                }
            }
        }
    }
    out
}

pub struct Instance {
    pub operator: ResolventOperator,
    pub contraction: ContractionMap,
    pub schedule: ParamSchedule,
    pub x0: Point,
    pub z: Point,
}

fn unit(v: Point) -> Point {
    let n = v.norm();
    v.scale(1.0 / n)
}

pub fn instance(c: &Config) -> Instance {
    let seed = c.seed;
    let operator = operator(c.op, DIM, seed);
    let contraction = match c.scheme {
        Scheme::Vame | Scheme::Vam => {
            ContractionMap::affine_random(0.5, random_point(DIM, 1.0, seed + 100), seed + 200)
        }
        Scheme::Hppa => ContractionMap::constant(random_point(DIM, 2.0, seed + 300)),
    }
    .unwrap();
    let alpha = contraction.alpha();
    let errors_on = c.scheme.has_errors();
    let random_errors = || {
        if errors_on {
            ErrorSchedule::RandomInverseSquare {
                scale: 0.5,
                dim: DIM,
                seed: seed + 400,
            }
        } else {
            ErrorSchedule::Zero
        }
    };
    let schedule = match c.sched {
        Sched::Example1 => ParamSchedule::example1(alpha, 1.3).unwrap(),
        Sched::Example2 => {
            let e_star = if errors_on {
                unit(random_point(DIM, 1.0, seed + 500))
            } else {
                Point::zeros(DIM)
            };
            ParamSchedule::example2(alpha, e_star).unwrap()
        }
        Sched::Generic => ParamSchedule::new(
            AlphaSchedule::power(1.0, 2.0, 0.7).unwrap(),
            LambdaSchedule::decaying(1.0, 1.0, 1.0).unwrap(),
            random_errors(),
        )
        .with_closed_form_moduli(),
        Sched::ConstAlpha => ParamSchedule::new(
            AlphaSchedule::power(0.5, 1.0, 0.0).unwrap(),
            LambdaSchedule::constant(1.0).unwrap(),
            random_errors(),
        )
        .with_closed_form_moduli(),
        Sched::ConstAlphaDecaying => ParamSchedule::new(
            AlphaSchedule::power(0.5, 1.0, 0.0).unwrap(),
            LambdaSchedule::decaying(1.0, 1.0, 1.0).unwrap(),
            random_errors(),
        )
        .with_closed_form_moduli(),
        Sched::SlowAlpha => ParamSchedule::new(
            AlphaSchedule::power(0.1, 1.0, 0.5).unwrap(),
            LambdaSchedule::constant(1.0).unwrap(),
            random_errors(),
        )
        .with_closed_form_moduli(),
    };
    let z = operator.known_zero().expect("every instance has a known zero").clone();
    let x0 = random_point(DIM, 3.0, seed + 600);
    Instance {
        operator,
        contraction,
        schedule,
        x0,
        z,
    }
}
