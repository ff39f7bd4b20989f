use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A Haar-distributed orthogonal matrix: the `Q` factor of a Gaussian
/// matrix with the signs of `R`'s diagonal folded in.
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// A point with coordinates drawn uniformly from `[-scale, scale]`.
pub fn random_point(dim: usize, scale: f64, seed: u64) -> super::Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rand_distr::Uniform::new_inclusive(-scale, scale).expect("finite scale");
    super::Point::from_raw((0..dim).map(|_| u.sample(&mut rng)).collect())
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub(crate) fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

pub(crate) fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    (q.transpose() * q - DMatrix::<f64>::identity(n, n)).amax()
}
