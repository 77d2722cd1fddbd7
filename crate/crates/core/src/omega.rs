//! The barred transfer operator 𝔏̄(x₀) = Σ_k x₀^k Ω_k acting on symmetric
//! polynomials of degree ≤ L−1 in each of x₁…x_n, and its joint spectrum.
//!
//! Multiplication by the rational coefficients J̄₀ and K̄_i never maps the
//! space into itself on its own; only the full combination does, and only
//! on symmetric polynomials (the poles at x_i = x_k cancel between the
//! substitution terms). The operator is therefore built by sampling
//! 𝔏̄(x₀)p on a tensor grid and interpolating, with the closure checked
//! rather than assumed.

use crate::config::SpectralConfig;
use crate::dense::{max_abs, vmax_abs, Mat, Vector};
use crate::error::{LabError, Result};
use crate::functional::{extract_fbar, lambda_bar, EigenChoice, FnSampler};
use crate::linalg;
use crate::poly::{held_out_error, interpolate, MultiPoly, PolyBasis, PolyOperator, TensorGrid};
use crate::rng::LabRng;
use crate::scalar::{cabs, cone, cr, Cx, Real};

/// Cap on L^n for operator extraction.
pub const MAX_SPACE: usize = 4096;

/// ā(x, y) = xq − y/q.
pub fn abar<T: Real>(x: Cx<T>, y: Cx<T>, q: Cx<T>) -> Cx<T> {
    x * q - y / q
}

/// b̄(x, y) = x − y.
pub fn bbar<T: Real>(x: Cx<T>, y: Cx<T>) -> Cx<T> {
    x - y
}

fn guard_points<T: Real>(x0: Cx<T>, xs: &[Cx<T>]) -> Result<()> {
    let all: Vec<Cx<T>> = std::iter::once(x0).chain(xs.iter().copied()).collect();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let gap = cabs(all[i] - all[j]);
            let scale = cabs(all[i]).max(cabs(all[j])).max(T::one());
            if gap < T::lit(1e-10) * scale {
                return Err(LabError::SingularCoefficient {
                    i,
                    j,
                    gap: gap.as_f64(),
                });
            }
        }
    }
    Ok(())
}

/// J̄₀ and K̄_i at (x₀; x₁…x_n).
#[derive(Debug, Clone)]
pub struct BarCoefficients<T: Real> {
    pub j0: Cx<T>,
    pub k: Vec<Cx<T>>,
}

pub fn bar_coefficients<T: Real>(
    cfg: &SpectralConfig<T>,
    x0: Cx<T>,
    xs: &[Cx<T>],
) -> Result<BarCoefficients<T>> {
    guard_points(x0, xs)?;
    let q = cfg.q();
    let ys = cfg.y();
    let pref = cone::<T>() / (cfg.sqrt_y_product() * cfg.two_pow_l());
    let prod = |f: &dyn Fn(Cx<T>) -> Cx<T>, it: &mut dyn Iterator<Item = Cx<T>>| {
        it.fold(cone::<T>(), |acc, v| acc * f(v))
    };

    let j0 = prod(&|y| abar(x0, y, q), &mut ys.iter().copied())
        * prod(&|xi| abar(xi, x0, q) / bbar(xi, x0), &mut xs.iter().copied())
        + prod(&|y| bbar(x0, y), &mut ys.iter().copied())
            * prod(&|xi| abar(x0, xi, q) / bbar(x0, xi), &mut xs.iter().copied());

    let k = xs
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let xi = *xi;
            let others = || xs.iter().enumerate().filter(move |(k, _)| *k != i).map(|(_, v)| *v);
            let up = prod(&|y| abar(xi, y, q), &mut ys.iter().copied())
                * prod(&|xk| abar(xk, xi, q) / bbar(xk, xi), &mut others());
            let down = prod(&|y| bbar(xi, y), &mut ys.iter().copied())
                * prod(&|xk| abar(xi, xk, q) / bbar(xi, xk), &mut others());
            x0 * (q - cone::<T>() / q) / (xi - x0) * pref * (up - down)
        })
        .collect();
    Ok(BarCoefficients { j0: j0 * pref, k })
}

/// (𝔏̄(x₀)p)(x) = J̄₀ p(x) − Σ_i K̄_i p(x with x_i → x₀).
pub fn lbar_apply<T: Real, F>(cfg: &SpectralConfig<T>, p: F, x0: Cx<T>, xs: &[Cx<T>]) -> Result<Cx<T>>
where
    F: Fn(&[Cx<T>]) -> Cx<T>,
{
    let co = bar_coefficients(cfg, x0, xs)?;
    let mut out = co.j0 * p(xs);
    let mut moved = xs.to_vec();
    for (i, k) in co.k.iter().enumerate() {
        moved[i] = x0;
        out -= *k * p(&moved);
        moved[i] = xs[i];
    }
    Ok(out)
}

/// 𝔏̄ as a polynomial in x₀ with operator coefficients, plus the checks
/// made while building it.
#[derive(Debug, Clone)]
pub struct LbarOperator<T: Real> {
    pub basis: PolyBasis,
    /// Coefficient operators of x₀⁰ … x₀^L.
    pub coeffs: Vec<PolyOperator<T>>,
    /// Relative size of the fitted x₀^{L+1} layer.
    pub x0_excess: T,
    /// Relative size of fitted x_i powers above L−1.
    pub x_excess: T,
    /// Worst relative asymmetry of an image polynomial.
    pub symmetry_defect: T,
    /// Worst relative mismatch at random off-grid points.
    pub held_out: T,
    pub condition: T,
}

fn sample_grid<T: Real>(n: usize, count: usize) -> TensorGrid<T> {
    let mut radii = vec![0.75 + 0.2 * n as f64 + 0.35];
    let mut phases = vec![0.11];
    for k in 0..n {
        radii.push(0.75 + 0.2 * k as f64);
        phases.push(0.31 + 0.53 * k as f64);
    }
    TensorGrid::circles(count, &radii, &phases)
}

fn check_space<T: Real>(cfg: &SpectralConfig<T>) -> Result<()> {
    cfg.check_capacity()?;
    let space = cfg.l.checked_pow(cfg.n as u32).unwrap_or(usize::MAX);
    if space > MAX_SPACE {
        return Err(LabError::Capacity {
            what: "L^n",
            value: space,
            cap: MAX_SPACE,
        });
    }
    Ok(())
}

/// Builds 𝔏̄(x₀) on symmetric polynomials in n = cfg.n variables of degree
/// ≤ L−1. Each image is fitted with degree bound L+1 in every variable, so
/// the layers above the expected degrees measure the failure of closure.
pub fn build_lbar<T: Real>(cfg: &SpectralConfig<T>) -> Result<LbarOperator<T>> {
    check_space(cfg)?;
    let (l, n) = (cfg.l, cfg.n);
    let basis = PolyBasis::symmetric(n, l - 1);
    let dim = basis.dim();
    let grid = sample_grid::<T>(n, l + 2);
    let mut mats = vec![Mat::<T>::zeros(dim, dim); l + 1];
    let (mut x0_excess, mut x_excess, mut sym, mut held) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut condition = T::one();
    let mut rng = LabRng::new(cfg.seed ^ 0x0e6a);
    let probes: Vec<Vec<Cx<T>>> = (0..2).map(|_| rng.spread_point(n + 1, 1.2, 0.15)).collect();

    for col in 0..dim {
        let p = basis.element_poly::<T>(col);
        let eval = |pt: &[Cx<T>]| lbar_apply(cfg, |x: &[Cx<T>]| p.eval(x), pt[0], &pt[1..]);
        let values: Vec<Cx<T>> = (0..grid.len()).map(|i| eval(&grid.point(i))).collect::<Result<_>>()?;
        let fit = interpolate(&grid, &values)?;
        condition = condition.max(fit.condition);
        let full = fit.poly;
        let scale = full.max_abs_coeff().max(T::lit(1e-30));
        for (idx, c) in full.coeffs().iter().enumerate() {
            let e = full.exponents(idx);
            if e[0] > l {
                x0_excess = x0_excess.max(cabs(*c) / scale);
            }
            if e[1..].iter().any(|v| *v > l - 1) {
                x_excess = x_excess.max(cabs(*c) / scale);
            }
        }
        held = held.max(held_out_error(&full, &probes, |pt| eval(pt))?);
        for (j, m) in mats.iter_mut().enumerate() {
            let slice = full.slice_in(0, j).remove_variable(0)?.truncate(l - 1);
            let (coords, defect) = basis.project(&slice)?;
            let rel = slice.max_abs_coeff() / scale;
            sym = sym.max(defect * rel);
            for (r, v) in coords.into_iter().enumerate() {
                m[(r, col)] = v;
            }
        }
    }
    Ok(LbarOperator {
        coeffs: mats
            .into_iter()
            .map(|matrix| PolyOperator {
                basis: basis.clone(),
                matrix,
            })
            .collect(),
        basis,
        x0_excess,
        x_excess,
        symmetry_defect: sym,
        held_out: held,
        condition,
    })
}

/// Joint eigenvectors of the Ω family.
#[derive(Debug, Clone)]
pub struct JointSpectrum<T: Real> {
    /// Unit-norm joint eigenvectors (columns) in the symmetric basis.
    pub vectors: Vec<Vector<T>>,
    /// (Δ₀ … Δ_L) per eigenvector.
    pub deltas: Vec<Vec<Cx<T>>>,
    /// Worst relative residual ‖Ω_k v − Δ_k v‖ over all k and vectors.
    pub residual: T,
    /// Numerical rank of the eigenvector matrix.
    pub rank: usize,
    /// dim − rank: nonzero when the family is not diagonalizable.
    pub defect: usize,
}

#[derive(Debug, Clone)]
pub struct OmegaFamily<T: Real> {
    pub cfg: SpectralConfig<T>,
    pub lbar: LbarOperator<T>,
    /// ‖[Ω_i, Ω_j]‖ / (‖Ω_i‖‖Ω_j‖).
    pub commutator_norms: Vec<Vec<T>>,
    /// c with Ω_L ≈ c·1.
    pub top_scalar: Cx<T>,
    /// ‖Ω_L − c·1‖ / |c|.
    pub top_scalar_residual: T,
    pub joint: JointSpectrum<T>,
}

impl<T: Real> OmegaFamily<T> {
    pub fn omegas(&self) -> &[PolyOperator<T>] {
        &self.lbar.coeffs
    }

    pub fn max_commutator(&self) -> T {
        self.commutator_norms
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(*v))
    }
}

fn rel_residual<T: Real>(m: &Mat<T>, v: &Vector<T>, theta: Cx<T>) -> T {
    let r = m * v - v * theta;
    let scale = max_abs(m).max(cabs(theta)) * vmax_abs(v);
    if scale > T::zero() {
        vmax_abs(&r) / scale
    } else {
        vmax_abs(&r)
    }
}

fn rayleigh<T: Real>(m: &Mat<T>, v: &Vector<T>) -> Cx<T> {
    v.dotc(&(m * v)) / v.dotc(v)
}

/// Diagonalizes a random combination Σ c_k Ω_k and reads every Ω_k off the
/// resulting vectors.
pub fn joint_spectrum<T: Real>(omegas: &[PolyOperator<T>], seed: u64) -> Result<JointSpectrum<T>> {
    let dim = omegas[0].matrix.nrows();
    let mut rng = LabRng::new(seed);
    let mut combo = Mat::<T>::zeros(dim, dim);
    for om in omegas {
        let norm = max_abs(&om.matrix);
        if norm > T::zero() {
            combo += &om.matrix * (rng.complex::<T>() / norm);
        }
    }
    let eig = linalg::eigen(&combo)?;
    let mut vectors = Vec::with_capacity(dim);
    let mut deltas = Vec::with_capacity(dim);
    let mut residual = T::zero();
    for c in 0..dim {
        let v = eig.right.column(c).into_owned();
        let ds: Vec<Cx<T>> = omegas.iter().map(|om| rayleigh(&om.matrix, &v)).collect();
        for (om, d) in omegas.iter().zip(&ds) {
            residual = residual.max(rel_residual(&om.matrix, &v, *d));
        }
        vectors.push(v);
        deltas.push(ds);
    }
    let rank = linalg::numerical_rank(&eig.right, T::lit(1e-6));
    Ok(JointSpectrum {
        vectors,
        deltas,
        residual,
        rank,
        defect: dim - rank,
    })
}

pub fn extract_omegas<T: Real>(cfg: &SpectralConfig<T>) -> Result<OmegaFamily<T>> {
    let lbar = build_lbar(cfg)?;
    let om = &lbar.coeffs;
    let commutator_norms = om
        .iter()
        .map(|a| om.iter().map(|b| a.commutator_norm(b)).collect())
        .collect();
    let top = &om[cfg.l].matrix;
    let dim = top.nrows();
    let top_scalar = top.trace() / cr::<T>(dim as f64);
    let off = top - Mat::<T>::identity(dim, dim) * top_scalar;
    let top_scalar_residual = max_abs(&off) / cabs(top_scalar).max(T::lit(1e-30));
    let joint = joint_spectrum(om, cfg.seed ^ 0x6a11)?;
    Ok(OmegaFamily {
        cfg: cfg.clone(),
        lbar,
        commutator_norms,
        top_scalar,
        top_scalar_residual,
        joint,
    })
}

/// One sector eigenvector checked against the Ω family.
#[derive(Debug, Clone)]
pub struct EigkEntry<T: Real> {
    pub index: usize,
    /// F̄_n vanishes identically (no constraint from this eigenvector).
    pub vanishing: bool,
    /// Coefficients of Λ̄(x₀).
    pub deltas: Vec<Cx<T>>,
    /// F̄_n in the symmetric basis.
    pub fbar: Vector<T>,
    /// Worst ‖Ω_k F̄ − Δ_k F̄‖ relative, over k.
    pub residual: T,
    /// Distance of (Δ_k) to the nearest joint-spectrum vector, relative per k.
    pub containment: T,
    /// Index of that nearest joint eigenvector.
    pub matched: usize,
    /// Worst fit diagnostic (held-out error or excess) of F̄ and Λ̄.
    pub fit_error: T,
}

#[derive(Debug, Clone)]
pub struct EigkReport<T: Real> {
    pub entries: Vec<EigkEntry<T>>,
    pub max_residual: T,
    pub max_containment: T,
    pub max_fit_error: T,
    /// Joint eigenvectors not matched by any transfer eigenvector.
    pub surplus: usize,
    /// Spread of Δ_L over the sector, relative.
    pub delta_top_spread: T,
}

fn delta_distance<T: Real>(a: &[Cx<T>], b: &[Cx<T>], scales: &[T]) -> T {
    a.iter()
        .zip(b)
        .zip(scales)
        .fold(T::zero(), |acc, ((x, y), s)| acc.max(cabs(*x - *y) / *s))
}

/// Checks Ω_k F̄_n = Δ_k F̄_n for every sector-n transfer eigenvector,
/// with Δ_k the coefficients of Λ̄, and locates each (Δ_k) in the joint
/// spectrum.
pub fn check_eigk<T: Real>(family: &OmegaFamily<T>) -> Result<EigkReport<T>> {
    let cfg = &family.cfg;
    let basis = &family.lbar.basis;
    let omegas = family.omegas();
    let mut entries = Vec::new();
    for eig in EigenChoice::all(cfg, cfg.n)? {
        let fit = extract_fbar(&FnSampler::new(cfg.clone(), eig.clone()))?;
        let lb = lambda_bar(&eig, cfg)?;
        let deltas = lb.poly.coeffs().to_vec();
        let (coords, sym_defect) = basis.project(&fit.poly)?;
        let f = Vector::from_vec(coords);
        let fit_error = fit.held_out.max(fit.excess).max(lb.held_out).max(lb.excess).max(sym_defect);
        let vanishing = vmax_abs(&f) < T::lit(1e-10);
        let mut residual = T::zero();
        if !vanishing {
            for (om, d) in omegas.iter().zip(&deltas) {
                residual = residual.max(rel_residual(&om.matrix, &f, *d));
            }
        }
        // per-k scale: the largest |Δ_k| seen in the joint spectrum
        let scales: Vec<T> = (0..deltas.len())
            .map(|k| {
                family
                    .joint
                    .deltas
                    .iter()
                    .fold(cabs(deltas[k]), |acc, d| acc.max(cabs(d[k])))
                    .max(T::lit(1e-30))
            })
            .collect();
        let (matched, containment) = family
            .joint
            .deltas
            .iter()
            .enumerate()
            .map(|(j, d)| (j, delta_distance(&deltas, d, &scales)))
            .fold((0, T::lit(f64::INFINITY)), |best, cur| if cur.1 < best.1 { cur } else { best });
        entries.push(EigkEntry {
            index: eig.index,
            vanishing,
            deltas,
            fbar: f,
            residual,
            containment,
            matched,
            fit_error,
        });
    }
    let live: Vec<&EigkEntry<T>> = entries.iter().filter(|e| !e.vanishing).collect();
    let max_residual = live.iter().fold(T::zero(), |acc, e| acc.max(e.residual));
    let max_containment = live.iter().fold(T::zero(), |acc, e| acc.max(e.containment));
    let max_fit_error = entries.iter().fold(T::zero(), |acc, e| acc.max(e.fit_error));
    let mut hit = vec![false; family.joint.deltas.len()];
    for e in &live {
        hit[e.matched] = true;
    }
    let surplus = hit.iter().filter(|h| !**h).count();
    let l = cfg.l;
    let delta_top_spread = match live.first() {
        Some(first) => {
            let base = first.deltas[l];
            live.iter().fold(T::zero(), |acc, e| {
                acc.max(cabs(e.deltas[l] - base) / cabs(base).max(T::lit(1e-30)))
            })
        }
        None => T::zero(),
    };
    Ok(EigkReport {
        entries,
        max_residual,
        max_containment,
        max_fit_error,
        surplus,
        delta_top_spread,
    })
}

/// Polynomial represented by a vector in `basis`.
pub fn to_poly<T: Real>(basis: &PolyBasis, v: &Vector<T>) -> MultiPoly<T> {
    basis.to_poly(v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{fz_coefficients, rapidity_of};
    use crate::scalar::{cexp, cx, czero};

    type C = Cx<f64>;

    fn cfg(l: usize, n: usize, seed: u64) -> SpectralConfig<f64> {
        SpectralConfig::random(l, n, seed).unwrap()
    }

    #[test]
    fn barred_coefficients_are_rescaled_functional_coefficients() {
        let c = cfg(3, 2, 21);
        let x0: C = cx(0.9, 0.4);
        let xs: Vec<C> = vec![cx(-0.5, 0.7), cx(1.3, -0.2)];
        let bar = bar_coefficients(&c, x0, &xs).unwrap();
        let l0 = rapidity_of(x0);
        let lams: Vec<C> = xs.iter().map(|x| rapidity_of(*x)).collect();
        let co = fz_coefficients(l0, &lams, &c).unwrap();
        let lf = c.l as f64;
        let j0 = co.j0 * cexp(l0 * lf);
        assert!(cabs(bar.j0 - j0) < 1e-12 * cabs(j0));
        for i in 0..2 {
            let k = co.k[i] * cexp(l0 + lams[i] * (lf - 1.0));
            assert!(cabs(bar.k[i] - k) < 1e-12 * cabs(k), "{} vs {}", bar.k[i], k);
        }
    }

    #[test]
    fn coincident_points_are_rejected() {
        let c = cfg(2, 1, 22);
        let x: C = cx(0.3, 0.2);
        assert!(matches!(
            bar_coefficients(&c, x, &[x]),
            Err(LabError::SingularCoefficient { .. })
        ));
    }

    #[test]
    fn empty_sector_gives_lambda_bar() {
        let c = cfg(3, 0, 23);
        let lb = build_lbar(&c).unwrap();
        assert_eq!(lb.basis.dim(), 1);
        let eig = EigenChoice::all(&c, 0).unwrap().remove(0);
        let fit = lambda_bar(&eig, &c).unwrap();
        for k in 0..=c.l {
            let got = lb.coeffs[k].matrix[(0, 0)];
            assert!(cabs(got - fit.poly.coeffs()[k]) < 1e-10);
        }
    }

    #[test]
    fn degree_in_x0_is_l() {
        let c = cfg(3, 2, 24);
        let lb = build_lbar(&c).unwrap();
        assert!(lb.x0_excess < 1e-9, "{}", lb.x0_excess);
        assert!(lb.x_excess < 1e-9, "{}", lb.x_excess);
        assert!(lb.symmetry_defect < 1e-9);
        assert!(lb.held_out < 1e-9);
    }

    #[test]
    fn family_commutes_and_top_is_scalar() {
        let c = cfg(3, 2, 25);
        let fam = extract_omegas(&c).unwrap();
        assert!(fam.max_commutator() < 1e-9, "{}", fam.max_commutator());
        assert!(fam.top_scalar_residual < 1e-9);
    }

    #[test]
    fn two_site_single_excitation() {
        let c = cfg(2, 1, 26);
        let fam = extract_omegas(&c).unwrap();
        let rep = check_eigk(&fam).unwrap();
        assert_eq!(rep.entries.len(), 2);
        assert!(rep.max_residual < 1e-9, "{}", rep.max_residual);
        assert!(rep.max_containment < 1e-7);
        for e in &rep.entries {
            assert!(cabs(e.deltas[c.l] - fam.top_scalar) < 1e-9 * cabs(fam.top_scalar));
            // 𝔏̄ applied pointwise to F̄ reproduces Λ̄F̄
            let p = to_poly(&fam.lbar.basis, &e.fbar);
            let x0: C = cx(0.4, -0.9);
            let xs: Vec<C> = vec![cx(1.1, 0.3)];
            let lhs = lbar_apply(&c, |x: &[C]| p.eval(x), x0, &xs).unwrap();
            let lam = e.deltas.iter().rev().fold(czero::<f64>(), |acc, d| acc * x0 + *d);
            let rhs = lam * p.eval(&xs);
            assert!(cabs(lhs - rhs) < 1e-9 * cabs(rhs).max(1e-3));
        }
    }
}
