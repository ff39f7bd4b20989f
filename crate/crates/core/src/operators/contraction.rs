use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::linalg::{orthogonality_defect, random_orthogonal};
use super::{OperatorError, Point};

type CustomMap = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

#[derive(Clone)]
pub enum ContractionKind {
    /// `f(x) = u`.
    Constant { anchor: Point },
    /// `f(x) = factor · Q x + offset` with `Q` orthogonal.
    Affine {
        factor: f64,
        q: DMatrix<f64>,
        offset: Point,
    },
    Custom(Arc<CustomMap>),
}

impl fmt::Debug for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractionKind::Constant { anchor } => write!(f, "Constant {{ anchor: {anchor:?} }}"),
            ContractionKind::Affine { factor, offset, .. } => {
                write!(f, "Affine {{ factor: {factor}, offset: {offset:?} }}")
            }
            ContractionKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A map `f` with a declared constant `α ∈ [0, 1)` such that
/// `‖f(x) - f(y)‖ <= α ‖x - y‖`.
#[derive(Clone, Debug)]
pub struct ContractionMap {
    dim: usize,
    alpha: f64,
    kind: ContractionKind,
    label: String,
}

fn check_alpha(alpha: f64) -> Result<(), OperatorError> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(OperatorError::Domain(format!("contraction constant {alpha} must lie in [0, 1)")))
    }
}

impl ContractionMap {
    /// The constant map onto `anchor`, with `α = 0`.
    pub fn constant(anchor: Point) -> Result<Self, OperatorError> {
        let dim = anchor.dim();
        Ok(ContractionMap {
            dim,
            alpha: 0.0,
            label: format!("constant {anchor:?}"),
            kind: ContractionKind::Constant { anchor },
        })
    }

    /// `x ↦ factor · Q x + offset`; the declared constant is `|factor|`.
    pub fn affine(factor: f64, q: DMatrix<f64>, offset: Point) -> Result<Self, OperatorError> {
        let dim = offset.dim();
        if q.nrows() != dim || q.ncols() != dim {
            return Err(OperatorError::DimensionMismatch {
                expected: dim,
                got: q.nrows().max(q.ncols()),
            });
        }
        let defect = orthogonality_defect(&q);
        if !(defect <= 1e-12) {
            return Err(OperatorError::Domain(format!("Q is not orthogonal (defect {defect})")));
        }
        check_alpha(factor.abs())?;
        Ok(ContractionMap {
            dim,
            alpha: factor.abs(),
            label: format!("affine factor={factor} (d={dim})"),
            kind: ContractionKind::Affine { factor, q, offset },
        })
    }

    /// [`ContractionMap::affine`] with a seeded random orthogonal `Q`.
    pub fn affine_random(factor: f64, offset: Point, seed: u64) -> Result<Self, OperatorError> {
        let q = random_orthogonal(offset.dim(), seed);
        let mut f = Self::affine(factor, q, offset)?;
        f.label = format!("affine factor={factor} (d={}, seed={seed})", f.dim);
        Ok(f)
    }

    /// A map given by a closure, trusted to be `alpha`-Lipschitz.
    pub fn custom<F>(dim: usize, alpha: f64, label: impl Into<String>, f: F) -> Result<Self, OperatorError>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        check_alpha(alpha)?;
        if dim == 0 {
            return Err(OperatorError::Domain("dimension must be positive".into()));
        }
        Ok(ContractionMap {
            dim,
            alpha,
            kind: ContractionKind::Custom(Arc::new(f)),
            label: label.into(),
        })
    }

    /// Overrides the declared constant without touching the map; used to
    /// build maps whose claim is false.
    pub fn with_claimed_alpha(mut self, alpha: f64) -> Result<Self, OperatorError> {
        check_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> &ContractionKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &Point) -> Result<Point, OperatorError> {
        x.expect_dim(self.dim)?;
        let out = match &self.kind {
            ContractionKind::Constant { anchor } => return Ok(anchor.clone()),
            ContractionKind::Affine { factor, q, offset } => {
                let qx = q * DVector::from_column_slice(x.coords());
                qx.iter()
                    .zip(offset.coords())
                    .map(|(v, b)| factor * v + b)
                    .collect()
            }
            ContractionKind::Custom(f) => {
                let y = f(x.coords());
                if y.len() != self.dim {
                    return Err(OperatorError::DimensionMismatch {
                        expected: self.dim,
                        got: y.len(),
                    });
                }
                y
            }
        };
        Point::new(out)
    }
}
