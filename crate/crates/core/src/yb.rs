//! R-matrix, monodromy and transfer matrices of the trigonometric six-vertex
//! model, together with numerical checks of the Yang-Baxter algebra.
//!
//! Conventions: the R-matrix is
//!
//! ```text
//!        | a 0 0 0 |
//! R(x) = | 0 c b 0 |     a = sinh(x + γ), b = sinh(x), c = sinh(γ)
//!        | 0 b c 0 |
//!        | 0 0 0 a |
//! ```
//!
//! and the monodromy matrix is the ordered product `P R(λ-μ_1) ⋯ P R(λ-μ_L)`
//! over the auxiliary space, with site 1 leftmost. Quantum basis states are
//! bit strings with site 1 as the most significant bit and a set bit meaning
//! spin down; `|0⟩` is index 0.

use crate::config::SpectralConfig;
use crate::dense::{
    basis_vector, bilinear, identity, kron, max_abs, rel_diff, sector_states, vmax_abs,
    DenseOperator, Mat, Vector,
};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::scalar::{cabs, cone, csinh, cx, czero, is_finite, Cx, Real};

/// Rapidities closer than this (in |sinh(difference)|) are rejected.
pub const COINCIDENCE_GUARD: f64 = 1e-7;

/// Boltzmann weights (a, b, c) at spectral difference `x`.
pub fn weights<T: Real>(x: Cx<T>, gamma: Cx<T>) -> (Cx<T>, Cx<T>, Cx<T>) {
    (csinh(x + gamma), csinh(x), csinh(gamma))
}

pub fn r_matrix<T: Real>(x: Cx<T>, gamma: Cx<T>) -> Result<Mat<T>> {
    if !is_finite(x) || !is_finite(gamma) {
        return Err(LabError::InvalidArgument("r_matrix: non-finite argument".into()));
    }
    let (a, b, c) = weights(x, gamma);
    let mut r = Mat::zeros(4, 4);
    r[(0, 0)] = a;
    r[(1, 1)] = c;
    r[(1, 2)] = b;
    r[(2, 1)] = b;
    r[(2, 2)] = c;
    r[(3, 3)] = a;
    Ok(r)
}

/// Permutation on C² ⊗ C².
pub fn permutation<T: Real>() -> Mat<T> {
    let mut p = Mat::zeros(4, 4);
    p[(0, 0)] = cone();
    p[(1, 2)] = cone();
    p[(2, 1)] = cone();
    p[(3, 3)] = cone();
    p
}

/// Max-norm of the difference between both sides of
/// `[R(x)⊗1][1⊗R(x+y)][R(y)⊗1] = [1⊗R(y)][R(x+y)⊗1][1⊗R(x)]`.
pub fn check_ybe<T: Real>(x: Cx<T>, y: Cx<T>, gamma: Cx<T>) -> Result<T> {
    let id2 = identity::<T>(2);
    let rx = r_matrix(x, gamma)?;
    let ry = r_matrix(y, gamma)?;
    let rxy = r_matrix(x + y, gamma)?;
    let lhs = kron(&rx, &id2) * kron(&id2, &rxy) * kron(&ry, &id2);
    let rhs = kron(&id2, &ry) * kron(&rxy, &id2) * kron(&id2, &rx);
    Ok(max_abs(&(lhs - rhs)))
}

/// Auxiliary-space blocks of the monodromy matrix at one spectral parameter.
#[derive(Debug, Clone)]
pub struct MonodromyEntries<T: Real> {
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub c: Mat<T>,
    pub d: Mat<T>,
}

impl<T: Real> MonodromyEntries<T> {
    pub fn block(&self, row: usize, col: usize) -> &Mat<T> {
        match (row, col) {
            (0, 0) => &self.a,
            (0, 1) => &self.b,
            (1, 0) => &self.c,
            _ => &self.d,
        }
    }

    /// Worst violation of: A, D preserve S^z, B lowers it, C raises it.
    pub fn block_structure_leakage(&self) -> T {
        use crate::dense::shift_leakage;
        shift_leakage(&self.a, 0)
            .max(shift_leakage(&self.d, 0))
            .max(shift_leakage(&self.b, 1))
            .max(shift_leakage(&self.c, -1))
    }
}

/// Site operators `L[α][β]` of `P R(x)` sliced over the auxiliary index.
fn lax_blocks<T: Real>(x: Cx<T>, gamma: Cx<T>) -> Result<[[Mat<T>; 2]; 2]> {
    let m = permutation::<T>() * r_matrix(x, gamma)?;
    let block = |alpha: usize, beta: usize| {
        Mat::from_fn(2, 2, |s_out, s_in| m[(2 * alpha + s_out, 2 * beta + s_in)])
    };
    Ok([[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]])
}

pub fn monodromy<T: Real>(lambda: Cx<T>, cfg: &SpectralConfig<T>) -> Result<MonodromyEntries<T>> {
    cfg.check_capacity()?;
    let one = Mat::from_element(1, 1, cone::<T>());
    let zero = Mat::from_element(1, 1, czero::<T>());
    let mut t = [[one.clone(), zero.clone()], [zero, one]];
    for mu in &cfg.mu {
        let lax = lax_blocks(lambda - *mu, cfg.gamma)?;
        let next = |alpha: usize, gamma_idx: usize| {
            kron(&t[alpha][0], &lax[0][gamma_idx]) + kron(&t[alpha][1], &lax[1][gamma_idx])
        };
        t = [[next(0, 0), next(0, 1)], [next(1, 0), next(1, 1)]];
    }
    let [[a, b], [c, d]] = t;
    Ok(MonodromyEntries { a, b, c, d })
}

/// T(λ) = A(λ) + D(λ).
pub fn transfer<T: Real>(lambda: Cx<T>, cfg: &SpectralConfig<T>) -> Result<DenseOperator<T>> {
    let m = monodromy(lambda, cfg)?;
    DenseOperator::new(m.a + m.d)
}

/// Normalized residual of `R(x-y)[T(x)⊗T(y)] = [T(y)⊗T(x)]R(x-y)` on the
/// 4·2^L dimensional space.
pub fn check_rtt<T: Real>(x: Cx<T>, y: Cx<T>, cfg: &SpectralConfig<T>) -> Result<T> {
    let tx = monodromy(x, cfg)?;
    let ty = monodromy(y, cfg)?;
    let n = cfg.dim();
    // (first ⊗ second) with quantum operators multiplied left to right
    let tensor = |first: &MonodromyEntries<T>, second: &MonodromyEntries<T>| {
        let mut big = Mat::zeros(4 * n, 4 * n);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let blk = first.block(a, c) * second.block(b, d);
                        big.view_mut(((2 * a + b) * n, (2 * c + d) * n), (n, n))
                            .copy_from(&blk);
                    }
                }
            }
        }
        big
    };
    let r = kron(&r_matrix(x - y, cfg.gamma)?, &identity(n));
    let lhs = &r * tensor(&tx, &ty);
    let rhs = tensor(&ty, &tx) * &r;
    Ok(rel_diff(&lhs, &rhs))
}

/// Result of a B-operator product.
#[derive(Debug, Clone)]
pub struct BProduct<T: Real> {
    pub op: DenseOperator<T>,
    /// Set when more B-operators than sites are multiplied: the product
    /// annihilates |0⟩.
    pub annihilates_vacuum: bool,
}

/// [λ_1, …, λ_n] = B(λ_1)⋯B(λ_n).
pub fn b_product<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<BProduct<T>> {
    let mut acc = identity::<T>(cfg.dim());
    for lam in lambdas {
        acc *= monodromy(*lam, cfg)?.b;
    }
    Ok(BProduct {
        op: DenseOperator::new(acc)?,
        annihilates_vacuum: lambdas.len() > cfg.l,
    })
}

/// B(λ_1)⋯B(λ_n)|0⟩ computed by successive matrix-vector products.
pub fn b_product_on_vacuum<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<Vector<T>> {
    let mut v = basis_vector::<T>(cfg.dim(), 0);
    for lam in lambdas.iter().rev() {
        v = monodromy(*lam, cfg)?.b * v;
    }
    Ok(v)
}

/// ∏_j a(λ-μ_j) and ∏_j b(λ-μ_j): the vacuum eigenvalues of A and D.
pub fn vacuum_products<T: Real>(lambda: Cx<T>, cfg: &SpectralConfig<T>) -> (Cx<T>, Cx<T>) {
    cfg.mu.iter().fold((cone(), cone()), |(pa, pb), mu| {
        let (a, b, _) = weights(lambda - *mu, cfg.gamma);
        (pa * a, pb * b)
    })
}

/// Rejects any pair with |sinh(λ_i - λ_j)| below the coincidence guard.
/// Index 0 refers to the first entry of `all`.
pub fn guard_distinct<T: Real>(all: &[Cx<T>]) -> Result<()> {
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let gap = cabs(csinh(all[i] - all[j])).as_f64();
            if gap < COINCIDENCE_GUARD {
                return Err(LabError::SingularCoefficient { i, j, gap });
            }
        }
    }
    Ok(())
}

/// Coefficients of the degree-(n+1) Yang-Baxter relations.
#[derive(Debug, Clone)]
pub struct OffCoefficients<T: Real> {
    pub ma0: Cx<T>,
    pub md0: Cx<T>,
    /// M^A_λ for λ = λ_1 … λ_n.
    pub ma: Vec<Cx<T>>,
    /// M^D_λ for λ = λ_1 … λ_n.
    pub md: Vec<Cx<T>>,
}

pub fn off_coefficients<T: Real>(
    lambda0: Cx<T>,
    lambdas: &[Cx<T>],
    gamma: Cx<T>,
) -> Result<OffCoefficients<T>> {
    let mut all = vec![lambda0];
    all.extend_from_slice(lambdas);
    guard_distinct(&all)?;
    let ratio = |x: Cx<T>| {
        let (a, b, _) = weights(x, gamma);
        a / b
    };
    let c_over_b = |x: Cx<T>| {
        let (_, b, c) = weights(x, gamma);
        c / b
    };
    let ma0 = lambdas.iter().fold(cone(), |acc, l| acc * ratio(*l - lambda0));
    let md0 = lambdas.iter().fold(cone(), |acc, l| acc * ratio(lambda0 - *l));
    let mut ma = Vec::with_capacity(lambdas.len());
    let mut md = Vec::with_capacity(lambdas.len());
    for (i, li) in lambdas.iter().enumerate() {
        let others = lambdas.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| *l);
        let pa = others.clone().fold(cone(), |acc, lt| acc * ratio(lt - *li));
        let pd = others.fold(cone(), |acc, lt| acc * ratio(*li - lt));
        ma.push(c_over_b(*li - lambda0) * pa);
        md.push(c_over_b(lambda0 - *li) * pd);
    }
    Ok(OffCoefficients { ma0, md0, ma, md })
}

/// X^{0,n}_λ: the rapidity set with λ_i replaced by λ_0.
pub fn replace_with<T: Real>(lambdas: &[Cx<T>], i: usize, lambda0: Cx<T>) -> Vec<Cx<T>> {
    let mut out = lambdas.to_vec();
    out[i] = lambda0;
    out
}

/// Normalized residuals of the A-line, the D-line and their sum (T-line).
#[derive(Debug, Clone, Copy)]
pub struct OffResiduals<T: Real> {
    pub a_relation: T,
    pub d_relation: T,
    pub t_relation: T,
}

pub fn check_off_relations<T: Real>(
    lambda0: Cx<T>,
    lambdas: &[Cx<T>],
    cfg: &SpectralConfig<T>,
) -> Result<OffResiduals<T>> {
    let co = off_coefficients(lambda0, lambdas, cfg.gamma)?;
    let m0 = monodromy(lambda0, cfg)?;
    let prod = b_product(lambdas, cfg)?.op.mat;

    let lhs_a = &m0.a * &prod;
    let lhs_d = &m0.d * &prod;
    let mut rhs_a = &prod * &m0.a * co.ma0;
    let mut rhs_d = &prod * &m0.d * co.md0;
    for (i, li) in lambdas.iter().enumerate() {
        let mi = monodromy(*li, cfg)?;
        let replaced = b_product(&replace_with(lambdas, i, lambda0), cfg)?.op.mat;
        rhs_a -= &replaced * &mi.a * co.ma[i];
        rhs_d -= &replaced * &mi.d * co.md[i];
    }
    let lhs_t = &lhs_a + &lhs_d;
    let rhs_t = &rhs_a + &rhs_d;
    Ok(OffResiduals {
        a_relation: rel_diff(&lhs_a, &rhs_a),
        d_relation: rel_diff(&lhs_d, &rhs_d),
        t_relation: rel_diff(&lhs_t, &rhs_t),
    })
}

/// Default probe points for separating transfer-matrix eigenvectors.
pub fn default_probes<T: Real>() -> [Cx<T>; 2] {
    [cx(0.137, 0.291), cx(-0.413, 0.173)]
}

/// A transfer-matrix eigenpair embedded in the full 2^L space.
///
/// `left` holds the components of the dual vector ⟨Λ| (a row vector, so
/// pairing with kets uses the unconjugated product).
#[derive(Debug, Clone)]
pub struct EigenPair<T: Real> {
    pub sector: usize,
    pub right: Vector<T>,
    pub left: Vector<T>,
    pub probe_values: [Cx<T>; 2],
    /// Worst of the left/right residuals at both probes.
    pub residual: T,
}

impl<T: Real> EigenPair<T> {
    /// Λ(λ) = ⟨Λ|T(λ)|Λ⟩ / ⟨Λ|Λ⟩.
    pub fn eigenvalue(&self, lambda: Cx<T>, cfg: &SpectralConfig<T>) -> Result<Cx<T>> {
        let t = transfer(lambda, cfg)?.mat;
        Ok(bilinear(&self.left, &(t * &self.right)) / bilinear(&self.left, &self.right))
    }
}

#[derive(Debug, Clone)]
pub struct SectorSpectrum<T: Real> {
    pub l: usize,
    pub sector: usize,
    pub states: Vec<usize>,
    pub pairs: Vec<EigenPair<T>>,
}

/// Relative residual ‖M v − θ v‖ / (‖M‖ ‖v‖) in max-norms.
fn eig_residual<T: Real>(m: &Mat<T>, v: &Vector<T>, theta: Cx<T>) -> T {
    let r = m * v - v * theta;
    let scale = max_abs(m).max(cabs(theta)) * vmax_abs(v);
    if scale > T::zero() {
        vmax_abs(&r) / scale
    } else {
        vmax_abs(&r)
    }
}

/// Eigenpairs of T restricted to the sector with `sector` down spins.
///
/// A generic combination T(p₁) + ξT(p₂) is diagonalized; since the family
/// commutes, its eigenvectors are common eigenvectors of every T(λ), and
/// coincidences at one probe are split by the other.
pub fn spectrum<T: Real>(
    cfg: &SpectralConfig<T>,
    sector: usize,
    probes: [Cx<T>; 2],
) -> Result<SectorSpectrum<T>> {
    if sector > cfg.l {
        return Err(LabError::InvalidArgument(format!(
            "sector {sector} outside [0, {}]",
            cfg.l
        )));
    }
    let states = sector_states(cfg.l, sector);
    let t1 = transfer(probes[0], cfg)?.sector_block(cfg.l, sector);
    let t2 = transfer(probes[1], cfg)?.sector_block(cfg.l, sector);
    let xi = cx::<T>(0.5773, 0.3271);
    let combo = &t1 + &t2 * xi;
    let eig = linalg::eigen(&combo)?;

    let scale = eig.values.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z))).max(T::one());
    for i in 0..eig.values.len() {
        for j in (i + 1)..eig.values.len() {
            let gap = cabs(eig.values[i] - eig.values[j]) / scale;
            if gap < T::lit(1e-8) {
                return Err(LabError::Degeneracy {
                    sector,
                    detail: format!("combined eigenvalues #{i} and #{j} differ by {gap:e}"),
                });
            }
        }
    }
    let left_all = linalg::inverse(&eig.right)?;
    let tol = cfg.tol;
    let dim = cfg.dim();
    let mut pairs = Vec::with_capacity(states.len());
    for k in 0..states.len() {
        let r = eig.right.column(k).into_owned();
        let mut w = left_all.row(k).transpose();
        let wn = w.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        w.unscale_mut(wn);
        let wr = bilinear(&w, &r);
        let mut probe_values = [czero(); 2];
        let mut worst = T::zero();
        for (p, t) in [&t1, &t2].into_iter().enumerate() {
            let theta = bilinear(&w, &(t * &r)) / wr;
            probe_values[p] = theta;
            worst = worst
                .max(eig_residual(t, &r, theta))
                .max(eig_residual(&t.transpose(), &w, theta));
        }
        if worst > tol {
            return Err(LabError::Degeneracy {
                sector,
                detail: format!("eigenpair #{k} residual {worst:e} exceeds tol"),
            });
        }
        let mut right = Vector::from_element(dim, czero());
        let mut left = Vector::from_element(dim, czero());
        for (i, s) in states.iter().enumerate() {
            right[*s] = r[i];
            left[*s] = w[i];
        }
        pairs.push(EigenPair {
            sector,
            right,
            left,
            probe_values,
            residual: worst,
        });
    }
    Ok(SectorSpectrum {
        l: cfg.l,
        sector,
        states,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::LabRng;
    use crate::scalar::cexp;

    type C = Cx<f64>;

    fn cfg(l: usize, seed: u64) -> SpectralConfig<f64> {
        SpectralConfig::random(l, 0, seed).unwrap()
    }

    #[test]
    fn r_matrix_special_points() {
        let g: C = cx(0.4, 0.2);
        let r0 = r_matrix(cx(0.0, 0.0), g).unwrap();
        assert!(max_abs(&(r0 - identity::<f64>(4) * csinh(g))) < 1e-15);
        let x: C = cx(0.3, -0.1);
        let rp = r_matrix(x, cx(0.0, 0.0)).unwrap();
        assert!(max_abs(&(rp - permutation::<f64>() * csinh(x))) < 1e-15);
        assert!(r_matrix(cx(f64::NAN, 0.0), g).is_err());
    }

    #[test]
    fn ybe_holds_and_is_symmetric() {
        let g: C = cx(0.7, 0.1);
        assert_eq!(check_ybe(cx(0.0, 0.0), cx(0.0, 0.0), g).unwrap(), 0.0);
        let mut rng = LabRng::new(3);
        for _ in 0..20 {
            let (x, y, g) = (rng.complex(), rng.complex(), rng.complex());
            let r1 = check_ybe::<f64>(x, y, g).unwrap();
            let r2 = check_ybe::<f64>(y, x, g).unwrap();
            assert!(r1 < 1e-12 && (r1 - r2).abs() < 1e-13);
        }
    }

    #[test]
    fn single_site_monodromy_is_sliced_lax_operator() {
        let c = cfg(1, 5);
        let lam: C = cx(0.2, 0.3);
        let m = monodromy(lam, &c).unwrap();
        let (a, b, cw) = weights(lam - c.mu[0], c.gamma);
        // aux ↑↑: diag(a, b); aux ↑↓: c|↓⟩⟨↑|; aux ↓↑: c|↑⟩⟨↓|; aux ↓↓: diag(b, a)
        let z = cx(0.0, 0.0);
        let expect = [
            [a, z, z, b],
            [z, z, cw, z],
            [z, cw, z, z],
            [b, z, z, a],
        ];
        for (blk, e) in [&m.a, &m.b, &m.c, &m.d].into_iter().zip(expect) {
            assert!(cabs(blk[(0, 0)] - e[0]) < 1e-15);
            assert!(cabs(blk[(0, 1)] - e[1]) < 1e-15);
            assert!(cabs(blk[(1, 0)] - e[2]) < 1e-15);
            assert!(cabs(blk[(1, 1)] - e[3]) < 1e-15);
        }
    }

    #[test]
    fn vacuum_actions() {
        let c = cfg(4, 8);
        let lam: C = cx(-0.3, 0.2);
        let m = monodromy(lam, &c).unwrap();
        let v0 = basis_vector::<f64>(c.dim(), 0);
        let (pa, pb) = vacuum_products(lam, &c);
        assert!(vmax_abs(&(&m.a * &v0 - &v0 * pa)) < 1e-13);
        assert!(vmax_abs(&(&m.d * &v0 - &v0 * pb)) < 1e-13);
        assert_eq!(vmax_abs(&(&m.c * &v0)), 0.0);
        assert!(m.block_structure_leakage() < 1e-12);
        let t = transfer(lam, &c).unwrap();
        assert!(cabs(t.mat[(0, 0)] - (pa + pb)) < 1e-13);
    }

    #[test]
    fn rtt_and_commutation() {
        let c = cfg(3, 2);
        let x: C = cx(0.3, 0.1);
        assert_eq!(check_rtt(x, x, &c).unwrap(), 0.0);
        let mut rng = LabRng::new(4);
        for _ in 0..3 {
            assert!(check_rtt(rng.complex(), rng.complex(), &c).unwrap() < 1e-12);
        }
        let (b1, b2) = (monodromy(x, &c).unwrap().b, monodromy(cx(-0.4, 0.2), &c).unwrap().b);
        assert!(max_abs(&(&b1 * &b2 - &b2 * &b1)) < 1e-12);
        let t1 = transfer(x, &c).unwrap().mat;
        let t2 = transfer(cx(0.9, -0.3), &c).unwrap().mat;
        assert!(rel_diff(&(&t1 * &t2), &(&t2 * &t1)) < 1e-12);
    }

    #[test]
    fn b_products() {
        let c = cfg(3, 6);
        let (l1, l2): (C, C) = (cx(0.1, 0.2), cx(-0.5, 0.1));
        let p12 = b_product(&[l1, l2], &c).unwrap().op.mat;
        let p21 = b_product(&[l2, l1], &c).unwrap().op.mat;
        assert!(max_abs(&(&p12 - &p21)) < 1e-12);
        let id = b_product::<f64>(&[], &c).unwrap().op.mat;
        assert_eq!(id, identity(c.dim()));
        let v = b_product_on_vacuum(&[l1, l2], &c).unwrap();
        assert!(vmax_abs(&(v - p12.column(0))) < 1e-13);
        let over = b_product(&[l1, l2, cx(0.3, 0.0), cx(0.7, 0.1)], &c).unwrap();
        assert!(over.annihilates_vacuum);
        assert!(vmax_abs(&over.op.mat.column(0).into_owned()) < 1e-13);
    }

    #[test]
    fn off_relations_small() {
        let c = cfg(2, 9);
        let mut rng = LabRng::new(10);
        let pts = rng.distinct::<f64>(2, 0.1);
        let r = check_off_relations(pts[0], &pts[1..], &c).unwrap();
        assert!(r.a_relation < 1e-11 && r.d_relation < 1e-11 && r.t_relation < 1e-11);
        let r0 = check_off_relations(pts[0], &[], &c).unwrap();
        assert_eq!(r0.t_relation, 0.0);
        let err = off_coefficients(pts[0], &[pts[0] + cx(1e-9, 0.0)], c.gamma).unwrap_err();
        assert!(matches!(err, LabError::SingularCoefficient { i: 0, j: 1, .. }));
    }

    #[test]
    fn spectrum_sector_zero_and_third_probe() {
        let c = cfg(1, 12);
        let s = spectrum(&c, 0, default_probes()).unwrap();
        assert_eq!(s.pairs.len(), 1);
        let lam: C = cx(0.25, -0.1);
        let (pa, pb) = vacuum_products(lam, &c);
        assert!(cabs(s.pairs[0].eigenvalue(lam, &c).unwrap() - (pa + pb)) < 1e-13);

        let c4 = cfg(4, 13);
        let total: usize = (0..=4)
            .map(|k| spectrum(&c4, k, default_probes()).unwrap().pairs.len())
            .sum();
        assert_eq!(total, 16);
        let s2 = spectrum(&c4, 2, default_probes()).unwrap();
        let l3: C = cx(0.61, 0.05);
        let t3 = transfer(l3, &c4).unwrap().mat;
        for p in &s2.pairs {
            let lam3 = p.eigenvalue(l3, &c4).unwrap();
            let r = &t3 * &p.right - &p.right * lam3;
            assert!(vmax_abs(&r) < 1e-10 * max_abs(&t3));
        }
    }

    #[test]
    fn b_entries_are_laurent_polynomials() {
        // e^{(L-1)λ} B(λ) is a degree-(L-1) polynomial in x = e^{2λ}
        let c = cfg(3, 14);
        let l = c.l;
        let nodes: Vec<C> = (0..=l).map(|k| cx(0.1 * k as f64 - 0.2, 0.3 * k as f64)).collect();
        let vals: Vec<Mat<f64>> = nodes
            .iter()
            .map(|lam| monodromy(*lam, &c).unwrap().b * cexp(*lam * (l as f64 - 1.0)))
            .collect();
        let xs: Vec<C> = nodes.iter().map(|lam| cexp(*lam * 2.0)).collect();
        // Lagrange through the first L nodes, predict the last one
        let target = xs[l];
        let mut pred = Mat::<f64>::zeros(c.dim(), c.dim());
        for i in 0..l {
            let mut w = cone::<f64>();
            for j in 0..l {
                if i != j {
                    w *= (target - xs[j]) / (xs[i] - xs[j]);
                }
            }
            pred += &vals[i] * w;
        }
        assert!(rel_diff(&pred, &vals[l]) < 1e-10);
    }
}
