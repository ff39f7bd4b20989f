//! Points of `R^d`, m-accretive operators given by their resolvents, and
//! contractions, with checkers for the basic resolvent facts.

mod contraction;
mod linalg;
mod resolvent;

use std::fmt;

use thiserror::Error;

use crate::TOL_FLOAT;

pub use contraction::{ContractionKind, ContractionMap};
pub use linalg::{random_orthogonal, random_point};
pub use resolvent::{ResolventKind, ResolventOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate {value} at position {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("linear solve failed: {0}")]
    Solve(String),
}

/// A point of `R^d` with finite coordinates, measured in the Euclidean norm.
#[derive(Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Point, OperatorError> {
        if coords.is_empty() {
            return Err(OperatorError::Domain("a point needs at least one coordinate".into()));
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(OperatorError::NonFinite { index, value });
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Point {
        Point(vec![0.0; dim.max(1)])
    }

    /// Skips validation; for values computed from already valid points.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Point {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|v| s * v).collect())
    }

    pub(crate) fn expect_dim(&self, dim: usize) -> Result<(), OperatorError> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(OperatorError::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<(), OperatorError> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(OperatorError::Domain(format!("step {gamma} must be positive and finite")))
    }
}

/// `J_γ x`.
pub fn resolvent(op: &ResolventOperator, gamma: f64, x: &Point) -> Result<Point, OperatorError> {
    op.resolvent(gamma, x)
}

/// `‖J_λ x - J_γ((γ/λ) x + (1 - γ/λ) J_λ x)‖`, which vanishes for every
/// accretive operator.
pub fn check_resolvent_identity(
    op: &ResolventOperator,
    lambda: f64,
    gamma: f64,
    x: &Point,
) -> Result<f64, OperatorError> {
    check_gamma(lambda)?;
    check_gamma(gamma)?;
    let jl = op.resolvent(lambda, x)?;
    let r = gamma / lambda;
    let inner: Vec<f64> = x
        .coords()
        .iter()
        .zip(jl.coords())
        .map(|(xi, ji)| r * xi + (1.0 - r) * ji)
        .collect();
    let jg = op.resolvent(gamma, &Point::from_raw(inner))?;
    Ok(jl.dist(&jg))
}

/// `‖J_γ x - J_λ x‖ <= |1 - γ/λ| ‖J_λ x - x‖`.
pub fn check_resolvent_inequality(
    op: &ResolventOperator,
    lambda: f64,
    gamma: f64,
    x: &Point,
) -> Result<bool, OperatorError> {
    check_gamma(lambda)?;
    check_gamma(gamma)?;
    let jl = op.resolvent(lambda, x)?;
    let jg = op.resolvent(gamma, x)?;
    let lhs = jg.dist(&jl);
    let rhs = (1.0 - gamma / lambda).abs() * jl.dist(x);
    Ok(lhs <= rhs + TOL_FLOAT)
}

/// `‖J_γ x - J_γ y‖ <= ‖x - y‖` on every pair.
pub fn check_nonexpansive(
    op: &ResolventOperator,
    gamma: f64,
    pairs: &[(Point, Point)],
) -> Result<bool, OperatorError> {
    for (x, y) in pairs {
        let jx = op.resolvent(gamma, x)?;
        let jy = op.resolvent(gamma, y)?;
        if !(jx.dist(&jy) <= x.dist(y) + TOL_FLOAT) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `‖f(x) - f(y)‖ <= α ‖x - y‖` on every pair, with `α` the declared constant.
pub fn check_contraction(
    f: &ContractionMap,
    pairs: &[(Point, Point)],
) -> Result<bool, OperatorError> {
    for (x, y) in pairs {
        let fx = f.apply(x)?;
        let fy = f.apply(y)?;
        if !(fx.dist(&fy) <= f.alpha() * x.dist(y) + TOL_FLOAT) {
            return Ok(false);
        }
    }
    Ok(true)
}
