//! Power iteration on sparse operators.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// A square linear operator that power iteration can drive. Implemented by
/// explicit sparse matrices and by the implicit PageRank supra-operator,
/// whose dense teleport term is never materialised.
pub trait LinearOp {
    fn dim(&self) -> usize;

    /// y = A x.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// An upper bound on the row sums, used as the diagonal shift that keeps
    /// the dominant eigenvector of a nonnegative operator nonnegative.
    fn shift_hint(&self) -> f64;
}

impl LinearOp for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }

    fn shift_hint(&self) -> f64 {
        self.max_row_sum()
    }
}

/// Leading eigenvector of `A + shift * I` by power iteration with the
/// deterministic uniform start vector, returned L1-normalised together with
/// the eigenvalue estimate of `A` itself (shift removed).
///
/// Works for nonnegative operators; the shift guarantees nonnegative iterates
/// and turns the dominant eigenvalue strictly positive.
pub fn leading_eigenvector(
    op: &(impl LinearOp + ?Sized),
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64)> {
    let dim = op.dim();
    assert!(dim > 0);
    let mut x = vec![1.0 / dim as f64; dim];
    let mut y = vec![0.0; dim];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        op.apply(&x, &mut y);
        if shift != 0.0 {
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi += shift * xi;
            }
        }
        let norm: f64 = y.iter().sum();
        if norm <= 0.0 {
            // operator annihilates the uniform vector; nothing dominates
            return Err(Error::NonConvergence {
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
        residual = 0.0;
        for (yi, xi) in y.iter_mut().zip(x.iter_mut()) {
            *yi /= norm;
            residual += (*yi - *xi).abs();
            *xi = *yi;
        }
        if residual < tol {
            // one more application to read off the eigenvalue
            op.apply(&x, &mut y);
            let lambda: f64 = y.iter().sum::<f64>() / x.iter().sum::<f64>();
            return Ok((x, lambda));
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Spectral radius estimate of a nonnegative sparse matrix by normalised
/// power iteration. Returns 0 for nilpotent matrices (the iterate dies out).
pub fn spectral_radius(a: &CsrMatrix, tol: f64, max_iter: usize) -> f64 {
    let dim = a.dim();
    if dim == 0 || a.nnz() == 0 {
        return 0.0;
    }
    let mut x = vec![1.0; dim];
    let mut y = vec![0.0; dim];
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        a.matvec(&x, &mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return 0.0; // nilpotent: the walk ran out of paths
        }
        let prev = lambda;
        lambda = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (lambda - prev).abs() <= tol * lambda.max(1.0) {
            return lambda;
        }
    }
    lambda
}
