use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::linalg::{min_symmetric_eigenvalue, random_orthogonal};
use super::{check_gamma, OperatorError, Point};

type CustomResolvent = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;

/// Relative residual accepted from a linear solve.
const SOLVE_TOL: f64 = 1e-12;

#[derive(Clone)]
pub enum ResolventKind {
    /// `A x = c x`, `c >= 0`.
    ScaledIdentity { c: f64 },
    /// `A x = M x` with `M + Mᵀ` positive semidefinite.
    Linear { matrix: DMatrix<f64> },
    /// Normal cone of `[lo, hi]^d`; the resolvent is the projection.
    BoxNormalCone { lo: f64, hi: f64 },
    /// Subdifferential of `w ‖x‖₁`; the resolvent is soft-thresholding.
    L1Subdifferential { weight: f64 },
    Custom(Arc<CustomResolvent>),
}

impl fmt::Debug for ResolventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolventKind::ScaledIdentity { c } => write!(f, "ScaledIdentity {{ c: {c} }}"),
            ResolventKind::Linear { matrix } => {
                write!(f, "Linear {{ {}x{} }}", matrix.nrows(), matrix.ncols())
            }
            ResolventKind::BoxNormalCone { lo, hi } => {
                write!(f, "BoxNormalCone {{ lo: {lo}, hi: {hi} }}")
            }
            ResolventKind::L1Subdifferential { weight } => {
                write!(f, "L1Subdifferential {{ weight: {weight} }}")
            }
            ResolventKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

type LuCache = Mutex<Option<(f64, LU<f64, Dyn, Dyn>)>>;

/// An m-accretive operator on `R^d`, known through `J_γ = (I + γA)^{-1}`.
#[derive(Clone)]
pub struct ResolventOperator {
    dim: usize,
    kind: ResolventKind,
    known_zero: Option<Point>,
    label: String,
    lu: Arc<LuCache>,
}

impl ResolventOperator {
    fn build(dim: usize, kind: ResolventKind, known_zero: Option<Point>, label: String) -> Self {
        ResolventOperator {
            dim,
            kind,
            known_zero,
            label,
            lu: Arc::new(Mutex::new(None)),
        }
    }

    fn check_dim(dim: usize) -> Result<(), OperatorError> {
        if dim == 0 {
            Err(OperatorError::Domain("dimension must be positive".into()))
        } else {
            Ok(())
        }
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Result<Self, OperatorError> {
        Self::check_dim(dim)?;
        if !(c >= 0.0 && c.is_finite()) {
            return Err(OperatorError::Domain(format!("scale c = {c} must be >= 0")));
        }
        Ok(Self::build(
            dim,
            ResolventKind::ScaledIdentity { c },
            Some(Point::zeros(dim)),
            format!("scaled identity c={c} (d={dim})"),
        ))
    }

    pub fn linear(matrix: DMatrix<f64>) -> Result<Self, OperatorError> {
        let dim = matrix.nrows();
        Self::check_dim(dim)?;
        if matrix.ncols() != dim {
            return Err(OperatorError::DimensionMismatch {
                expected: dim,
                got: matrix.ncols(),
            });
        }
        if let Some(v) = matrix.iter().find(|v| !v.is_finite()) {
            return Err(OperatorError::Domain(format!("matrix entry {v} is not finite")));
        }
        let scale = matrix.amax().max(1.0);
        let min_eig = min_symmetric_eigenvalue(&matrix);
        if min_eig < -1e-10 * scale {
            return Err(OperatorError::Domain(format!(
                "M + Mᵀ is not positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        Ok(Self::build(
            dim,
            ResolventKind::Linear { matrix },
            Some(Point::zeros(dim)),
            format!("linear PSD (d={dim})"),
        ))
    }

    /// `M = Q diag(spectrum) Qᵀ` with `Q` a seeded random orthogonal matrix.
    pub fn linear_from_spectrum(spectrum: &[f64], seed: u64) -> Result<Self, OperatorError> {
        if let Some(v) = spectrum.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(OperatorError::Domain(format!("eigenvalue {v} must be >= 0")));
        }
        let dim = spectrum.len();
        Self::check_dim(dim)?;
        let q = random_orthogonal(dim, seed);
        let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(spectrum)) * q.transpose();
        let mut op = Self::linear(m)?;
        op.label = format!("linear PSD spectrum (d={dim}, seed={seed})");
        Ok(op)
    }

    pub fn box_normal_cone(dim: usize, lo: f64, hi: f64) -> Result<Self, OperatorError> {
        Self::check_dim(dim)?;
        if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(OperatorError::Domain(format!("empty box [{lo}, {hi}]")));
        }
        let mid = lo + (hi - lo) / 2.0;
        Ok(Self::build(
            dim,
            ResolventKind::BoxNormalCone { lo, hi },
            Some(Point::from_raw(vec![mid; dim])),
            format!("box normal cone [{lo}, {hi}]^{dim}"),
        ))
    }

    pub fn l1_subdifferential(dim: usize, weight: f64) -> Result<Self, OperatorError> {
        Self::check_dim(dim)?;
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(OperatorError::Domain(format!("weight {weight} must be >= 0")));
        }
        Ok(Self::build(
            dim,
            ResolventKind::L1Subdifferential { weight },
            Some(Point::zeros(dim)),
            format!("l1 subdifferential w={weight} (d={dim})"),
        ))
    }

    /// An operator supplied by its resolvent. The caller is responsible for
    /// the closure being the resolvent of an m-accretive operator.
    pub fn custom<F>(dim: usize, label: impl Into<String>, known_zero: Option<Point>, f: F) -> Result<Self, OperatorError>
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::check_dim(dim)?;
        if let Some(z) = &known_zero {
            z.expect_dim(dim)?;
        }
        Ok(Self::build(dim, ResolventKind::Custom(Arc::new(f)), known_zero, label.into()))
    }

    /// Replaces the declared zero. It is not checked to be a zero.
    pub fn with_known_zero(mut self, z: Point) -> Result<Self, OperatorError> {
        z.expect_dim(self.dim)?;
        self.known_zero = Some(z);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ResolventKind {
        &self.kind
    }

    pub fn known_zero(&self) -> Option<&Point> {
        self.known_zero.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn resolvent(&self, gamma: f64, x: &Point) -> Result<Point, OperatorError> {
        check_gamma(gamma)?;
        x.expect_dim(self.dim)?;
        let xs = x.coords();
        let out = match &self.kind {
            ResolventKind::ScaledIdentity { c } => {
                let d = 1.0 + gamma * c;
                xs.iter().map(|v| v / d).collect()
            }
            ResolventKind::BoxNormalCone { lo, hi } => xs.iter().map(|v| v.clamp(*lo, *hi)).collect(),
            ResolventKind::L1Subdifferential { weight } => {
                let t = gamma * weight;
                xs.iter().map(|v| v.signum() * (v.abs() - t).max(0.0)).collect()
            }
            ResolventKind::Linear { matrix } => self.solve_linear(matrix, gamma, xs)?,
            ResolventKind::Custom(f) => {
                let y = f(gamma, xs);
                if y.len() != self.dim {
                    return Err(OperatorError::DimensionMismatch {
                        expected: self.dim,
                        got: y.len(),
                    });
                }
                y
            }
        };
        if let Some((index, &value)) = out.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(OperatorError::NonFinite { index, value });
        }
        Ok(Point::from_raw(out))
    }

    /// Solves `(I + γM) y = x` by LU, with one refinement step and a
    /// normwise relative residual check.
    fn solve_linear(&self, m: &DMatrix<f64>, gamma: f64, xs: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let a = DMatrix::<f64>::identity(self.dim, self.dim) + m * gamma;
        let b = DVector::from_column_slice(xs);
        let mut cache = self.lu.lock().unwrap_or_else(|e| e.into_inner());
        if cache.as_ref().map(|(g, _)| *g) != Some(gamma) {
            *cache = Some((gamma, a.clone().lu()));
        }
        let lu = &cache.as_ref().expect("filled above").1;
        let singular = || OperatorError::Solve(format!("I + {gamma}·M is singular"));
        let mut y = lu.solve(&b).ok_or_else(singular)?;
        let r = &b - &a * &y;
        y += lu.solve(&r).ok_or_else(singular)?;
        let residual = (&a * &y - &b).norm();
        let scale = a.norm() * y.norm() + b.norm();
        if residual > SOLVE_TOL * scale {
            return Err(OperatorError::Solve(format!(
                "relative residual {} exceeds {SOLVE_TOL}",
                residual / scale
            )));
        }
        Ok(y.as_slice().to_vec())
    }
}

impl fmt::Debug for ResolventOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResolventOperator")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("known_zero", &self.known_zero)
            .field("label", &self.label)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ResolventOperator::scaled_identity(0, 1.0).is_err());
        assert!(ResolventOperator::scaled_identity(2, -1.0).is_err());
        assert!(ResolventOperator::box_normal_cone(2, 1.0, 0.0).is_err());
        assert!(ResolventOperator::l1_subdifferential(2, f64::NAN).is_err());
        let neg = DMatrix::from_diagonal_element(2, 2, -1.0);
        assert!(ResolventOperator::linear(neg).is_err());
        assert!(ResolventOperator::linear(DMatrix::zeros(2, 3)).is_err());
        assert!(ResolventOperator::linear_from_spectrum(&[1.0, -0.1], 0).is_err());
    }

    #[test]
    fn skew_matrix_is_accretive() {
        let k = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        let op = ResolventOperator::linear(k.clone()).unwrap();
        let x = Point::new(vec![1.0, -3.0]).unwrap();
        let y = op.resolvent(0.5, &x).unwrap();
        let a = DMatrix::<f64>::identity(2, 2) + k * 0.5;
        let back = a * DVector::from_column_slice(y.coords());
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] + 3.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_operator_matches_closed_form_on_eigenvectors() {
        let op = ResolventOperator::linear_from_spectrum(&[2.0, 2.0, 2.0], 9).unwrap();
        // M = 2I for any Q, so J_γ x = x / (1 + 2γ).
        let x = Point::new(vec![1.0, 2.0, 3.0]).unwrap();
        let y = op.resolvent(0.25, &x).unwrap();
        for (a, b) in y.coords().iter().zip(x.coords()) {
            assert!((a - b / 1.5).abs() < 1e-14);
        }
    }

    #[test]
    fn custom_dimension_is_checked() {
        let bad = ResolventOperator::custom(2, "bad", None, |_, _| vec![0.0]).unwrap();
        assert!(bad.resolvent(1.0, &Point::zeros(2)).is_err());
    }

    #[test]
    fn soft_threshold_values() {
        let op = ResolventOperator::l1_subdifferential(3, 0.5).unwrap();
        let x = Point::new(vec![2.0, -0.3, -1.5]).unwrap();
        let y = op.resolvent(2.0, &x).unwrap();
        assert_eq!(y.coords(), &[1.0, 0.0, -0.5]);
    }
}
