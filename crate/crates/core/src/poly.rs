//! Dense multivariate polynomials with a per-variable degree bound, linear
//! operators on those spaces, and tensor-grid interpolation.
//!
//! Coefficients are stored in lexicographic exponent order with the first
//! variable most significant: the coefficient of `x^e` sits at
//! `Σ_i e_i (m+1)^(n-1-i)`.

use std::ops::{Add, Mul, Sub};

use crate::dense::Mat;
use crate::error::{LabError, Result};
use crate::linalg;
use crate::scalar::{binomial, cabs, cone, cpowi, cr, cx, czero, factorial, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<T: Real> {
    nvars: usize,
    degree: usize,
    coeffs: Vec<Cx<T>>,
}

fn exps_of(mut idx: usize, nvars: usize, degree: usize) -> Vec<usize> {
    let base = degree + 1;
    let mut e = vec![0; nvars];
    for slot in e.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    e
}

impl<T: Real> MultiPoly<T> {
    pub fn zeros(nvars: usize, degree: usize) -> Self {
        Self {
            nvars,
            degree,
            coeffs: vec![czero(); (degree + 1).pow(nvars as u32)],
        }
    }

    pub fn constant(nvars: usize, degree: usize, c: Cx<T>) -> Self {
        let mut p = Self::zeros(nvars, degree);
        p.coeffs[0] = c;
        p
    }

    pub fn monomial(nvars: usize, degree: usize, exps: &[usize], c: Cx<T>) -> Result<Self> {
        let mut p = Self::zeros(nvars, degree);
        let idx = p.index(exps)?;
        p.coeffs[idx] = c;
        Ok(p)
    }

    pub fn from_coeffs(nvars: usize, degree: usize, coeffs: Vec<Cx<T>>) -> Result<Self> {
        if coeffs.len() != (degree + 1).pow(nvars as u32) {
            return Err(LabError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                (degree + 1).pow(nvars as u32),
                coeffs.len()
            )));
        }
        if !coeffs.iter().all(|z| crate::scalar::is_finite(*z)) {
            return Err(LabError::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { nvars, degree, coeffs })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn index(&self, exps: &[usize]) -> Result<usize> {
        if exps.len() != self.nvars || exps.iter().any(|e| *e > self.degree) {
            return Err(LabError::InvalidArgument(format!(
                "exponent {exps:?} outside K^{}[x] in {} variables",
                self.degree, self.nvars
            )));
        }
        Ok(exps.iter().fold(0, |acc, e| acc * (self.degree + 1) + e))
    }

    pub fn exponents(&self, idx: usize) -> Vec<usize> {
        exps_of(idx, self.nvars, self.degree)
    }

    pub fn coeff(&self, exps: &[usize]) -> Result<Cx<T>> {
        Ok(self.coeffs[self.index(exps)?])
    }

    pub fn set_coeff(&mut self, exps: &[usize], c: Cx<T>) -> Result<()> {
        let idx = self.index(exps)?;
        self.coeffs[idx] = c;
        Ok(())
    }

    /// Horner evaluation, one variable at a time from the innermost.
    pub fn eval(&self, point: &[Cx<T>]) -> Cx<T> {
        assert_eq!(point.len(), self.nvars, "point arity");
        let base = self.degree + 1;
        let mut buf = self.coeffs.clone();
        for x in point.iter().rev() {
            let next: Vec<Cx<T>> = buf
                .chunks(base)
                .map(|chunk| chunk.iter().rev().fold(czero(), |acc, c| acc * *x + *c))
                .collect();
            buf = next;
        }
        buf[0]
    }

    /// ∂^k / ∂x_i^k.
    pub fn partial_derivative(&self, i: usize, k: usize) -> Self {
        let mut out = Self::zeros(self.nvars, self.degree);
        if k > self.degree {
            return out;
        }
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mut e = self.exponents(idx);
            if e[i] < k {
                continue;
            }
            let f = (0..k).fold(T::one(), |acc, j| acc * T::lit((e[i] - j) as f64));
            e[i] -= k;
            let j = out.index(&e).expect("lowered exponent stays in range");
            out.coeffs[j] = *c * f;
        }
        out
    }

    /// f(…, x_i, …) ↦ f(…, α, …); the arity is kept with x_i pinned.
    pub fn substitute(&self, i: usize, alpha: Cx<T>) -> Self {
        let mut out = Self::zeros(self.nvars, self.degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mut e = self.exponents(idx);
            let pw = cpowi(alpha, e[i]);
            e[i] = 0;
            let j = out.index(&e).expect("pinned exponent stays in range");
            out.coeffs[j] += *c * pw;
        }
        out
    }

    /// Largest exponent of x_i carrying a nonzero coefficient.
    pub fn degree_in(&self, i: usize) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| cabs(**c) > T::zero())
            .map(|(idx, _)| self.exponents(idx)[i])
            .max()
            .unwrap_or(0)
    }

    /// Truncated Taylor realization Σ_{k=0}^{order} (α − x_i)^k / k! ∂_i^k.
    pub fn taylor_substitution(&self, i: usize, alpha: Cx<T>, order: usize) -> Result<Self> {
        if order < self.degree_in(i) {
            return Err(LabError::Contract(format!(
                "Taylor order {order} is below deg_x{} = {}",
                i + 1,
                self.degree_in(i)
            )));
        }
        let mut out = Self::zeros(self.nvars, self.degree);
        let mut deriv = self.clone();
        for k in 0..=order.min(self.degree) {
            let scaled = deriv.scale(cr(1.0 / factorial::<f64>(k)));
            // multiply by (α − x_i)^k = Σ_j C(k,j) α^{k-j} (−x_i)^j
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let w = cpowi(alpha, k - j) * cr(sign * binomial(k, j) as f64);
                out = out + scaled.shift_up(i, j)?.scale(w);
            }
            deriv = deriv.partial_derivative(i, 1);
        }
        Ok(out)
    }

    /// Multiplication by x_i^j; fails if a nonzero coefficient would leave
    /// the degree bound.
    pub fn shift_up(&self, i: usize, j: usize) -> Result<Self> {
        let mut out = Self::zeros(self.nvars, self.degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if *c == czero() {
                continue;
            }
            let mut e = self.exponents(idx);
            e[i] += j;
            if e[i] > self.degree {
                return Err(LabError::Contract(format!(
                    "x_{}^{j} times the polynomial exceeds degree bound {}",
                    i + 1,
                    self.degree
                )));
            }
            let k = out.index(&e)?;
            out.coeffs[k] = *c;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc.max(cabs(*c)))
    }

    pub fn max_coeff_diff(&self, other: &Self) -> T {
        assert_eq!((self.nvars, self.degree), (other.nvars, other.degree));
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (a, b)| acc.max(cabs(*a - *b)))
    }

    /// Reorders variables: new variable `k` is old variable `perm[k]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.nvars, self.degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = self.exponents(idx);
            let ne: Vec<usize> = perm.iter().map(|p| e[*p]).collect();
            let k = out.index(&ne).expect("permutation keeps range");
            out.coeffs[k] = *c;
        }
        out
    }

    /// Worst coefficient change under adjacent transpositions, relative to
    /// the largest coefficient.
    pub fn symmetry_defect(&self) -> T {
        let scale = self.max_abs_coeff();
        let mut worst = T::zero();
        for i in 0..self.nvars.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..self.nvars).collect();
            perm.swap(i, i + 1);
            worst = worst.max(self.max_coeff_diff(&self.permute_variables(&perm)));
        }
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }

    /// Largest coefficient whose exponent in some variable exceeds `bound`,
    /// relative to the largest coefficient.
    pub fn excess_above(&self, bound: usize) -> T {
        let scale = self.max_abs_coeff();
        let worst = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.exponents(*idx).iter().any(|e| *e > bound))
            .fold(T::zero(), |acc, (_, c)| acc.max(cabs(*c)));
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }

    /// Same polynomial with a different degree bound; lowering fails if it
    /// would drop a nonzero coefficient.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        let mut out = Self::zeros(self.nvars, degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = self.exponents(idx);
            if e.iter().any(|x| *x > degree) {
                if *c != czero() {
                    return Err(LabError::Contract(format!(
                        "coefficient at {e:?} does not fit degree bound {degree}"
                    )));
                }
                continue;
            }
            let k = out.index(&e)?;
            out.coeffs[k] = *c;
        }
        Ok(out)
    }

    /// Drops every coefficient with some exponent above `degree`.
    pub fn truncate(&self, degree: usize) -> Self {
        let mut out = Self::zeros(self.nvars, degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = self.exponents(idx);
            if let Ok(k) = out.index(&e) {
                out.coeffs[k] = *c;
            }
        }
        out
    }

    /// Coefficients of powers of variable `i`, each as a polynomial in the
    /// remaining variables (still carried with full arity, x_i pinned to 0).
    pub fn slice_in(&self, i: usize, power: usize) -> Self {
        let mut out = Self::zeros(self.nvars, self.degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mut e = self.exponents(idx);
            if e[i] == power {
                e[i] = 0;
                let k = out.index(&e).expect("in range");
                out.coeffs[k] = *c;
            }
        }
        out
    }

    /// Drops variable `i`, which must not appear.
    pub fn remove_variable(&self, i: usize) -> Result<Self> {
        if self.degree_in(i) != 0 {
            return Err(LabError::Contract(format!("variable {i} still appears")));
        }
        let mut out = Self::zeros(self.nvars - 1, self.degree);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mut e = self.exponents(idx);
            if e[i] != 0 {
                continue;
            }
            e.remove(i);
            let k = out.index(&e)?;
            out.coeffs[k] = *c;
        }
        Ok(out)
    }
}

impl<T: Real> Add for MultiPoly<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!((self.nvars, self.degree), (rhs.nvars, rhs.degree));
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl<T: Real> Sub for MultiPoly<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!((self.nvars, self.degree), (rhs.nvars, rhs.degree));
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl<T: Real> Mul<Cx<T>> for MultiPoly<T> {
    type Output = Self;
    fn mul(self, rhs: Cx<T>) -> Self {
        self.scale(rhs)
    }
}

/// Per-variable interpolation nodes; the grid is their Cartesian product.
#[derive(Debug, Clone)]
pub struct TensorGrid<T: Real> {
    pub nodes: Vec<Vec<Cx<T>>>,
}

impl<T: Real> TensorGrid<T> {
    /// `count` equispaced nodes on a circle per variable; circle `k` has
    /// radius `radii[k]` and rotation `phases[k]`.
    pub fn circles(count: usize, radii: &[f64], phases: &[f64]) -> Self {
        let nodes = radii
            .iter()
            .zip(phases)
            .map(|(r, ph)| {
                (0..count)
                    .map(|j| {
                        let t = ph + std::f64::consts::TAU * j as f64 / count as f64;
                        cx(r * t.cos(), r * t.sin())
                    })
                    .collect()
            })
            .collect();
        Self { nodes }
    }

    /// Circles with radii 0.75, 0.95, 1.15, … so that coordinates of
    /// distinct variables never coincide.
    pub fn standard(nvars: usize, count: usize) -> Self {
        let radii: Vec<f64> = (0..nvars).map(|k| 0.75 + 0.2 * k as f64).collect();
        let phases: Vec<f64> = (0..nvars).map(|k| 0.31 + 0.53 * k as f64).collect();
        Self::circles(count, &radii, &phases)
    }

    pub fn nvars(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point with flat index `idx` (first variable most significant).
    pub fn point(&self, mut idx: usize) -> Vec<Cx<T>> {
        let mut p = vec![czero(); self.nvars()];
        for k in (0..self.nvars()).rev() {
            let len = self.nodes[k].len();
            p[k] = self.nodes[k][idx % len];
            idx /= len;
        }
        p
    }
}

/// Interpolating polynomial and the worst 1-D Vandermonde condition number.
#[derive(Debug, Clone)]
pub struct Interpolant<T: Real> {
    pub poly: MultiPoly<T>,
    pub condition: T,
}

/// Tensor-product interpolation of values given at every grid point.
/// All variables must carry the same node count `m + 1`.
pub fn interpolate<T: Real>(grid: &TensorGrid<T>, values: &[Cx<T>]) -> Result<Interpolant<T>> {
    let nvars = grid.nvars();
    if nvars == 0 {
        return Ok(Interpolant {
            poly: MultiPoly::constant(0, 0, values[0]),
            condition: T::one(),
        });
    }
    let count = grid.nodes[0].len();
    if grid.nodes.iter().any(|n| n.len() != count) || values.len() != grid.len() {
        return Err(LabError::InvalidArgument("interpolation grid shape mismatch".into()));
    }
    let mut data = values.to_vec();
    let mut condition = T::one();
    for (axis, nodes) in grid.nodes.iter().enumerate() {
        for i in 0..count {
            for j in (i + 1)..count {
                if cabs(nodes[i] - nodes[j]) < T::lit(1e-12) {
                    return Err(LabError::GridCollision(format!(
                        "nodes {i} and {j} of axis {axis} coincide"
                    )));
                }
            }
        }
        let vander = Mat::<T>::from_fn(count, count, |r, c| cpowi(nodes[r], c));
        condition = condition.max(linalg::condition_number(&vander));
        let inv = linalg::inverse(&vander)?;
        // apply inv along `axis`
        let stride = count.pow((nvars - 1 - axis) as u32);
        let block = stride * count;
        let mut next = data.clone();
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for r in 0..count {
                    let mut acc = czero::<T>();
                    for c in 0..count {
                        acc += inv[(r, c)] * data[start + off + c * stride];
                    }
                    next[start + off + r * stride] = acc;
                }
            }
        }
        data = next;
    }
    Ok(Interpolant {
        poly: MultiPoly::from_coeffs(nvars, count - 1, data)?,
        condition,
    })
}

/// Samples `f` over the grid and interpolates.
pub fn sample_and_interpolate<T: Real, F>(grid: &TensorGrid<T>, mut f: F) -> Result<Interpolant<T>>
where
    F: FnMut(&[Cx<T>]) -> Result<Cx<T>>,
{
    let values: Vec<Cx<T>> = (0..grid.len().max(1))
        .map(|idx| f(&grid.point(idx)))
        .collect::<Result<_>>()?;
    interpolate(grid, &values)
}

/// Relative mismatch |p(x) − f(x)| / max(|p(x)|, |f(x)|) maximized over points.
pub fn held_out_error<T: Real, F>(p: &MultiPoly<T>, points: &[Vec<Cx<T>>], mut f: F) -> Result<T>
where
    F: FnMut(&[Cx<T>]) -> Result<Cx<T>>,
{
    let mut worst = T::zero();
    for pt in points {
        let direct = f(pt)?;
        let interp = p.eval(pt);
        let scale = cabs(direct).max(cabs(interp));
        let err = cabs(direct - interp);
        worst = worst.max(if scale > T::zero() { err / scale } else { err });
    }
    Ok(worst)
}

/// Which basis of a degree-bounded space an operator matrix refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// All monomials x^e, 0 ≤ e_i ≤ m.
    Full,
    /// Monomial symmetric functions m_λ, one per non-increasing λ.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyBasis {
    pub kind: BasisKind,
    pub nvars: usize,
    pub degree: usize,
    elements: Vec<Vec<usize>>,
}

impl PolyBasis {
    pub fn full(nvars: usize, degree: usize) -> Self {
        let count = (degree + 1).pow(nvars as u32);
        Self {
            kind: BasisKind::Full,
            nvars,
            degree,
            elements: (0..count).map(|i| exps_of(i, nvars, degree)).collect(),
        }
    }

    pub fn symmetric(nvars: usize, degree: usize) -> Self {
        let count = (degree + 1).pow(nvars as u32);
        let elements = (0..count)
            .map(|i| exps_of(i, nvars, degree))
            .filter(|e| e.windows(2).all(|w| w[0] >= w[1]))
            .collect();
        Self {
            kind: BasisKind::Symmetric,
            nvars,
            degree,
            elements,
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    /// Distinct exponent tuples making up basis element `k`.
    pub fn support(&self, k: usize) -> Vec<Vec<usize>> {
        match self.kind {
            BasisKind::Full => vec![self.elements[k].clone()],
            BasisKind::Symmetric => distinct_permutations(&self.elements[k]),
        }
    }

    pub fn element_poly<T: Real>(&self, k: usize) -> MultiPoly<T> {
        let mut p = MultiPoly::zeros(self.nvars, self.degree);
        for e in self.support(k) {
            p.set_coeff(&e, cone()).expect("support in range");
        }
        p
    }

    pub fn to_poly<T: Real>(&self, coords: &[Cx<T>]) -> MultiPoly<T> {
        let mut p = MultiPoly::zeros(self.nvars, self.degree);
        for (k, c) in coords.iter().enumerate() {
            for e in self.support(k) {
                p.set_coeff(&e, *c).expect("support in range");
            }
        }
        p
    }

    /// Coordinates of `p` in this basis plus the relative part of `p` the
    /// basis cannot represent (nonzero for non-symmetric input to a
    /// symmetric basis).
    pub fn project<T: Real>(&self, p: &MultiPoly<T>) -> Result<(Vec<Cx<T>>, T)> {
        let p = if p.degree() == self.degree {
            p.clone()
        } else {
            p.with_degree(self.degree)?
        };
        if p.nvars() != self.nvars {
            return Err(LabError::InvalidArgument("projection arity mismatch".into()));
        }
        let coords: Vec<Cx<T>> = self
            .elements
            .iter()
            .map(|e| p.coeff(e).expect("in range"))
            .collect();
        let back = self.to_poly(&coords);
        let scale = p.max_abs_coeff();
        let defect = back.max_coeff_diff(&p);
        Ok((coords, if scale > T::zero() { defect / scale } else { defect }))
    }
}

fn distinct_permutations(e: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = e.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    // next lexicographic permutation until exhausted
    loop {
        let n = sorted.len();
        if n < 2 {
            break;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| sorted[i] < sorted[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| sorted[j] > sorted[i]).expect("exists");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(sorted.clone());
    }
    out
}

/// A linear map on a degree-bounded polynomial space, as a matrix in `basis`.
#[derive(Debug, Clone)]
pub struct PolyOperator<T: Real> {
    pub basis: PolyBasis,
    pub matrix: Mat<T>,
}

impl<T: Real> PolyOperator<T> {
    pub fn identity(basis: PolyBasis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            matrix: Mat::identity(d, d),
        }
    }

    /// Builds the matrix column by column from the image of each basis
    /// element; images must lie in the span of the basis.
    pub fn from_action<F>(basis: PolyBasis, mut image: F) -> Result<Self>
    where
        F: FnMut(&MultiPoly<T>) -> Result<MultiPoly<T>>,
    {
        let d = basis.dim();
        let mut matrix = Mat::zeros(d, d);
        for k in 0..d {
            let img = image(&basis.element_poly(k))?;
            let (coords, defect) = basis.project(&img)?;
            if defect > T::lit(1e-9) {
                return Err(LabError::Contract(format!(
                    "image of basis element {k} leaves the basis span (defect {defect:e})"
                )));
            }
            for (r, c) in coords.into_iter().enumerate() {
                matrix[(r, k)] = c;
            }
        }
        Ok(Self { basis, matrix })
    }

    pub fn apply(&self, p: &MultiPoly<T>) -> Result<MultiPoly<T>> {
        let (coords, _) = self.basis.project(p)?;
        let v = crate::dense::Vector::from_vec(coords);
        let out = &self.matrix * v;
        Ok(self.basis.to_poly(out.as_slice()))
    }

    /// ‖[A, B]‖ / (‖A‖ ‖B‖) in entrywise max-norms.
    pub fn commutator_norm(&self, other: &Self) -> T {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        let num = crate::dense::max_abs(&(ab - ba));
        let den = crate::dense::max_abs(&self.matrix) * crate::dense::max_abs(&other.matrix);
        if den > T::zero() {
            num / den
        } else {
            num
        }
    }
}

/// D^{x₀}_{x_i} on K^m[x] (full basis) as a polynomial in x₀: entry `j` is
/// the operator multiplying x₀^j, obtained by expanding
/// Σ_k (x₀ − x_i)^k / k! ∂_i^k.
pub fn substitution_operator<T: Real>(nvars: usize, degree: usize, i: usize) -> Result<Vec<PolyOperator<T>>> {
    let basis = PolyBasis::full(nvars, degree);
    (0..=degree)
        .map(|j| {
            PolyOperator::from_action(basis.clone(), |p| {
                let mut out = MultiPoly::zeros(nvars, degree);
                for k in j..=degree {
                    let dk = p.partial_derivative(i, k);
                    let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let w = sign * binomial(k, j) as f64 / factorial::<f64>(k);
                    out = out + dk.shift_up(i, k - j)?.scale(cr(w));
                }
                Ok(out)
            })
        })
        .collect()
}
