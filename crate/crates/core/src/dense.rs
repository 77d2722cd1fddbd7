//! Dense complex operators on the quantum space and their sector bookkeeping.

use nalgebra::{DMatrix, DVector};

use crate::error::{LabError, Result};
use crate::scalar::{cabs, czero, is_finite, Cx, Real};

pub type Mat<T> = DMatrix<Cx<T>>;
pub type Vector<T> = DVector<Cx<T>>;

/// A square complex operator, optionally tagged with the S^z sector
/// (number of down spins) it is restricted to.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T: Real> {
    pub mat: Mat<T>,
    pub sector: Option<usize>,
}

impl<T: Real> DenseOperator<T> {
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if !mat.is_square() || !mat.nrows().is_power_of_two() {
            return Err(LabError::InvalidArgument(format!(
                "operator must be square with power-of-two dimension, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !mat.iter().all(|z| is_finite(*z)) {
            return Err(LabError::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { mat, sector: None })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Largest entry outside the declared sector block (zero when untagged).
    pub fn sector_leakage(&self) -> T {
        let Some(s) = self.sector else {
            return T::zero();
        };
        let mut worst = T::zero();
        for (r, c, z) in iter_entries(&self.mat) {
            let inside = popcount(r) == s && popcount(c) == s;
            if !inside {
                worst = worst.max(cabs(z));
            }
        }
        worst
    }

    /// The block acting inside sector `s`, in ascending basis-index order.
    pub fn sector_block(&self, l: usize, s: usize) -> Mat<T> {
        let states = sector_states(l, s);
        Mat::from_fn(states.len(), states.len(), |i, j| self.mat[(states[i], states[j])])
    }
}

fn iter_entries<T: Real>(m: &Mat<T>) -> impl Iterator<Item = (usize, usize, Cx<T>)> + '_ {
    (0..m.ncols()).flat_map(move |c| (0..m.nrows()).map(move |r| (r, c, m[(r, c)])))
}

#[inline]
pub fn popcount(s: usize) -> usize {
    s.count_ones() as usize
}

/// Basis states with exactly `s` down spins. Site 1 is the most significant bit.
pub fn sector_states(l: usize, s: usize) -> Vec<usize> {
    (0..1usize << l).filter(|&b| popcount(b) == s).collect()
}

/// Largest entry that violates "maps sector k to sector k + shift".
pub fn shift_leakage<T: Real>(m: &Mat<T>, shift: isize) -> T {
    let mut worst = T::zero();
    for (r, c, z) in iter_entries(m) {
        if popcount(r) as isize - popcount(c) as isize != shift {
            worst = worst.max(cabs(z));
        }
    }
    worst
}

pub fn max_abs<T: Real>(m: &Mat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

pub fn vmax_abs<T: Real>(v: &Vector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// max|a - b| / max(max|a|, max|b|), or the raw difference when both vanish.
pub fn rel_diff<T: Real>(a: &Mat<T>, b: &Mat<T>) -> T {
    let diff = max_abs(&(a - b));
    let scale = max_abs(a).max(max_abs(b));
    if scale > T::zero() {
        diff / scale
    } else {
        diff
    }
}

pub fn kron<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    a.kronecker(b)
}

pub fn identity<T: Real>(n: usize) -> Mat<T> {
    Mat::identity(n, n)
}

/// Standard basis vector e_k of dimension `dim`.
pub fn basis_vector<T: Real>(dim: usize, k: usize) -> Vector<T> {
    let mut v = Vector::from_element(dim, czero());
    v[k] = crate::scalar::cone();
    v
}

/// Unconjugated bilinear form wᵀv.
pub fn bilinear<T: Real>(w: &Vector<T>, v: &Vector<T>) -> Cx<T> {
    w.iter().zip(v.iter()).fold(czero(), |acc, (a, b)| acc + *a * *b)
}
