//! Dense eigen-decomposition and least squares on complex matrices.

use nalgebra::linalg::Schur;

use crate::dense::{Mat, Vector};
use crate::error::{LabError, Result};
use crate::scalar::{cabs, cone, czero, Cx, Real};

/// Eigenvalues with unit-norm right eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub values: Vec<Cx<T>>,
    pub right: Mat<T>,
}

/// Schur factorization followed by triangular back-substitution.
pub fn eigen<T: Real>(m: &Mat<T>) -> Result<Eigen<T>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(LabError::InvalidArgument("eigen: matrix is not square".into()));
    }
    if n == 0 {
        return Ok(Eigen { values: vec![], right: Mat::zeros(0, 0) });
    }
    let schur = Schur::try_new(m.clone(), T::EPS, 10_000)
        .ok_or_else(|| LabError::Numerical("Schur iteration did not converge".into()))?;
    let (q, u) = schur.unpack();
    let unorm = u.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
    let small = (unorm * T::EPS).max(T::min_value().unwrap_or(T::EPS));
    let values: Vec<Cx<T>> = (0..n).map(|k| u[(k, k)]).collect();

    let mut y = Mat::<T>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = cone();
        for i in (0..k).rev() {
            let mut acc = czero::<T>();
            for j in (i + 1)..=k {
                acc += u[(i, j)] * y[(j, k)];
            }
            let mut denom = u[(i, i)] - values[k];
            if cabs(denom) < small {
                denom = Cx::new(small, T::zero());
            }
            y[(i, k)] = -acc / denom;
        }
    }
    let mut right = q * y;
    for mut col in right.column_iter_mut() {
        let nrm = col.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if nrm > T::zero() {
            col.unscale_mut(nrm);
        }
    }
    Ok(Eigen { values, right })
}

pub fn inverse<T: Real>(m: &Mat<T>) -> Result<Mat<T>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| LabError::Numerical("matrix is singular".into()))
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq<T: Real>(a: &Mat<T>, b: &Vector<T>) -> Result<Vector<T>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, T::EPS * T::lit(16.0))
        .map_err(|e| LabError::Numerical(format!("least squares failed: {e}")))
}

pub fn singular_values<T: Real>(m: &Mat<T>) -> Vec<T> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Ratio of extreme singular values (infinite for singular input).
pub fn condition_number<T: Real>(m: &Mat<T>) -> T {
    let sv = singular_values(m);
    let hi = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let lo = sv.iter().copied().fold(hi, |a, b| a.min(b));
    if lo > T::zero() {
        hi / lo
    } else {
        T::max_value().unwrap_or(hi)
    }
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numerical_rank<T: Real>(m: &Mat<T>, rel_tol: T) -> usize {
    let sv = singular_values(m);
    let hi = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
    sv.iter().filter(|s| **s > rel_tol * hi).count()
}
