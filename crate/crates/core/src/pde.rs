//! Closed-form coefficients of the order-(L−1) equation
//! [𝒱 + Σ_i 𝒬_i ∂_i^{L−1}] F̄ = Δ_{L−1} F̄ and its small-size solutions.

use crate::config::SpectralConfig;
use crate::dense::{max_abs, Mat};
use crate::error::{LabError, Result};
use crate::omega::{extract_omegas, OmegaFamily};
use crate::poly::{held_out_error, sample_and_interpolate, MultiPoly, PolyBasis, PolyOperator, TensorGrid};
use crate::rng::LabRng;
use crate::scalar::{cabs, cexp, cln, cone, cpow_signed, cpowi, csqrt, czero, factorial, Cx, Real};

/// Σ_{k=0}^{upper} q^k, zero for negative `upper`.
pub fn geometric_sum<T: Real>(q: Cx<T>, upper: i64) -> Cx<T> {
    if upper < 0 {
        return czero();
    }
    (0..=upper).fold((czero(), cone()), |(acc, pw), _| (acc + pw, pw * q)).0
}

/// (1 − q^{upper+1}) / (1 − q); the closed form of [`geometric_sum`].
pub fn geometric_closed<T: Real>(q: Cx<T>, upper: i64) -> Cx<T> {
    if upper < 0 {
        return czero();
    }
    (cone::<T>() - cpowi(q, (upper + 1) as usize)) / (cone::<T>() - q)
}

/// e_m(vals), with e_0 = 1 and e_m = 0 outside 0..=len.
pub fn elementary_symmetric<T: Real>(vals: &[Cx<T>], m: usize) -> Cx<T> {
    let mut e = vec![czero::<T>(); vals.len() + 1];
    e[0] = cone();
    for (k, v) in vals.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * *v;
        }
    }
    e.get(m).copied().unwrap_or_else(czero)
}

fn sign<T: Real>(exp: i64) -> T {
    if exp.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Which of the four cases defines ψ_{l,d}, split at t = L − (n+1) + 2l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiBranch {
    Above,
    DiagonalLong,
    DiagonalShort,
    Below,
}

pub fn psi_branch(l: usize, d: usize, big_l: usize, n: usize) -> PsiBranch {
    let t = big_l as i64 - (n as i64 + 1) + 2 * l as i64;
    let d = d as i64;
    if d > t {
        PsiBranch::Above
    } else if d == t && big_l >= 5 {
        PsiBranch::DiagonalLong
    } else if d == t {
        PsiBranch::DiagonalShort
    } else {
        PsiBranch::Below
    }
}

pub fn psi<T: Real>(l: usize, d: usize, big_l: usize, n: usize, q: Cx<T>) -> (PsiBranch, Cx<T>) {
    let (li, di, ll, ni) = (l as i64, d as i64, big_l as i64, n as i64);
    let branch = psi_branch(l, d, big_l, n);
    let v = match branch {
        PsiBranch::Above => {
            cpow_signed(q, ll + 2 * li)
                * geometric_sum(q, 2 * di + 2 * ni - 3 - ll - 4 * li)
                * sign::<T>(ll + di + li)
        }
        PsiBranch::DiagonalLong => {
            cpow_signed(q, ll + 2 * li) * geometric_sum(q, ll - 5) * sign::<T>(3 * li - ni - 1)
        }
        PsiBranch::DiagonalShort => {
            cpow_signed(q, 2 * ll + 2 * li - 4) * geometric_sum(q, 3 - ll) * sign::<T>(3 * li - ni)
        }
        PsiBranch::Below => {
            cpow_signed(q, 2 * di + 2 * ni - 2 - 2 * li)
                * geometric_sum(q, ll - 2 * di - 2 * ni + 1 + 4 * li)
                * sign::<T>(ll + di + li + 1)
        }
    };
    (branch, v)
}

/// ψ_{l,d} for 0 ≤ l ≤ n−1, 0 ≤ d ≤ L, indexed `[l][d]`.
pub fn psi_table<T: Real>(cfg: &SpectralConfig<T>) -> Vec<Vec<(PsiBranch, Cx<T>)>> {
    let q = cfg.q();
    (0..cfg.n)
        .map(|l| (0..=cfg.l).map(|d| psi(l, d, cfg.l, cfg.n, q)).collect())
        .collect()
}

/// 𝒱^{(n)} at x₁…x_n (affine in Σx_i).
pub fn eval_v<T: Real>(cfg: &SpectralConfig<T>, xs: &[Cx<T>]) -> Cx<T> {
    let (l, n) = (cfg.l as i64, xs.len() as i64);
    let q = cfg.q();
    let sum_y = cfg.y().into_iter().fold(czero(), |a, y| a + y);
    let sum_x = xs.iter().fold(czero(), |a, x| a + *x);
    let v1 = (cpow_signed(q, n) + cpow_signed(q, l - n - 2)) * sum_y;
    let qm = (q - cone::<T>()) * (q - cone::<T>()) * (q + cone::<T>());
    let v2 = if l >= 2 * (n - 1) {
        cpow_signed(q, n - 2) * qm * geometric_sum(q, l + 1 - 2 * n) * sum_x
    } else {
        -(cpow_signed(q, l - n) * qm * geometric_sum(q, 2 * n - 3 - l) * sum_x)
    };
    -(v1 + v2) / (cfg.sqrt_y_product() * cfg.two_pow_l())
}

/// 𝒬^{(n)}_i at x₁…x_n; coincident coordinates are rejected.
pub fn eval_q<T: Real>(cfg: &SpectralConfig<T>, i: usize, xs: &[Cx<T>]) -> Result<Cx<T>> {
    let (l, n) = (cfg.l, xs.len());
    let q = cfg.q();
    let xi = xs[i];
    let others: Vec<Cx<T>> = xs.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| *v).collect();
    let mut denom = cone::<T>();
    for (j, xj) in xs.iter().enumerate() {
        if j == i {
            continue;
        }
        let gap = *xj - xi;
        if cabs(gap) < T::lit(1e-10) * cabs(xi).max(T::one()) {
            return Err(LabError::SingularCoefficient {
                i,
                j,
                gap: cabs(gap).as_f64(),
            });
        }
        denom *= gap;
    }
    let ys = cfg.y();
    let qm = (q - cone::<T>()) * (q - cone::<T>()) * (q + cone::<T>());
    let pre = qm
        / (cpowi(q, l + n) * cfg.two_pow_l() * factorial::<T>(l - 1) * cfg.sqrt_y_product() * denom);
    let mut total = czero::<T>();
    for m in 0..=l {
        let d = l - m;
        let g = (0..n).fold(czero::<T>(), |acc, lv| {
            acc + cpowi(xi, lv) * psi(lv, d, l, n, q).1 * elementary_symmetric(&others, n - 1 - lv)
        }) * cpowi(xi, d);
        total += g * elementary_symmetric(&ys, m);
    }
    Ok(pre * total)
}

/// [𝒱 + Σ𝒬_i∂_i^{L−1}]p at one point.
pub fn closedform_apply<T: Real>(cfg: &SpectralConfig<T>, p: &MultiPoly<T>, xs: &[Cx<T>]) -> Result<Cx<T>> {
    let mut out = eval_v(cfg, xs) * p.eval(xs);
    for i in 0..xs.len() {
        out += eval_q(cfg, i, xs)? * p.partial_derivative(i, cfg.l - 1).eval(xs);
    }
    Ok(out)
}

fn sample_points<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<Cx<T>>> {
    let mut rng = LabRng::new(seed);
    (0..count).map(|_| rng.spread_point(n, 1.1, 0.15)).collect()
}

/// max over sample points of |𝒱f + Σ𝒬_i∂_i^{L−1}f − Δf|, each divided by
/// the largest of the individual terms at that point.
pub fn closedform_residual<T: Real>(cfg: &SpectralConfig<T>, fbar: &MultiPoly<T>, delta: Cx<T>) -> Result<T> {
    let n = fbar.nvars();
    let mut worst = T::zero();
    for pt in sample_points::<T>(n, 10, cfg.seed ^ 0x9de) {
        let f = fbar.eval(&pt);
        let mut terms = vec![eval_v(cfg, &pt) * f, -(delta * f)];
        for i in 0..n {
            terms.push(eval_q(cfg, i, &pt)? * fbar.partial_derivative(i, cfg.l - 1).eval(&pt));
        }
        let total = terms.iter().fold(czero::<T>(), |a, t| a + *t);
        let scale = terms.iter().fold(T::zero(), |a, t| a.max(cabs(*t)));
        worst = worst.max(if scale > T::zero() { cabs(total) / scale } else { cabs(total) });
    }
    Ok(worst)
}

/// The closed-form operator on symmetric polynomials, with closure checks.
#[derive(Debug, Clone)]
pub struct ClosedFormOperator<T: Real> {
    pub op: PolyOperator<T>,
    /// Relative size of fitted powers above L−1.
    pub excess: T,
    pub symmetry_defect: T,
    pub held_out: T,
}

/// Action on the symmetric monomial basis of K^{L−1}[x], obtained by
/// sampling on a tensor grid and fitting with degree bound L+1.
pub fn closedform_operator<T: Real>(cfg: &SpectralConfig<T>) -> Result<ClosedFormOperator<T>> {
    let (l, n) = (cfg.l, cfg.n);
    let basis = PolyBasis::symmetric(n, l - 1);
    let dim = basis.dim();
    let grid = TensorGrid::standard(n, l + 2);
    let probes = sample_points::<T>(n, 2, cfg.seed ^ 0xc105);
    let mut matrix = Mat::<T>::zeros(dim, dim);
    let (mut excess, mut sym, mut held) = (T::zero(), T::zero(), T::zero());
    for col in 0..dim {
        let p = basis.element_poly::<T>(col);
        let eval = |x: &[Cx<T>]| closedform_apply(cfg, &p, x);
        let fit = sample_and_interpolate(&grid, eval)?;
        excess = excess.max(fit.poly.excess_above(l - 1));
        held = held.max(held_out_error(&fit.poly, &probes, eval)?);
        let (coords, defect) = basis.project(&fit.poly.truncate(l - 1))?;
        sym = sym.max(defect);
        for (r, v) in coords.into_iter().enumerate() {
            matrix[(r, col)] = v;
        }
    }
    Ok(ClosedFormOperator {
        op: PolyOperator { basis, matrix },
        excess,
        symmetry_defect: sym,
        held_out: held,
    })
}

/// Outcome of comparing the closed form with the extracted Ω_{L−1}.
#[derive(Debug, Clone)]
pub struct Comparison<T: Real> {
    /// ‖Ω_{L−1} − closed form‖ / ‖Ω_{L−1}‖ in max-norm.
    pub difference: T,
    pub closed: ClosedFormOperator<T>,
}

pub fn compare_with_family<T: Real>(family: &OmegaFamily<T>) -> Result<Comparison<T>> {
    let cfg = &family.cfg;
    let closed = closedform_operator(cfg)?;
    let omega = &family.omegas()[cfg.l - 1].matrix;
    let difference = max_abs(&(omega - &closed.op.matrix)) / max_abs(omega);
    Ok(Comparison { difference, closed })
}

pub fn compare_omega_closedform<T: Real>(cfg: &SpectralConfig<T>) -> Result<Comparison<T>> {
    compare_with_family(&extract_omegas(cfg)?)
}

/// The cases solved in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// n = 0, any L.
    N0,
    /// n = 1, L = 2.
    N1L2,
    /// n = 2, L = 2.
    N2L2,
}

impl SpecialCase {
    pub fn shape(self) -> Option<(usize, usize)> {
        match self {
            SpecialCase::N0 => None,
            SpecialCase::N1L2 => Some((1, 2)),
            SpecialCase::N2L2 => Some((2, 2)),
        }
    }
}

/// A polynomial eigenfunction of the order-(L−1) equation with its Δ_{L−1}.
#[derive(Debug, Clone)]
pub struct SpecialSolution<T: Real> {
    pub fbar: MultiPoly<T>,
    pub delta: Cx<T>,
}

/// −(1+q^{L−2})Σy / (2^L √∏y).
pub fn delta_n0<T: Real>(cfg: &SpectralConfig<T>) -> Cx<T> {
    let q = cfg.q();
    let sum_y = cfg.y().into_iter().fold(czero(), |a, y| a + y);
    -((cone::<T>() + cpow_signed(q, cfg.l as i64 - 2)) * sum_y) / (cfg.sqrt_y_product() * cfg.two_pow_l())
}

/// −(1+q²)(y₁+y₂)/(4q√(y₁y₂)) − s(q²−1)²/(4q²) for exponent s = ±1.
pub fn delta_n1l2<T: Real>(cfg: &SpectralConfig<T>, s: i32) -> Cx<T> {
    let q = cfg.q();
    let y = cfg.y();
    let q2 = q * q;
    let first = (cone::<T>() + q2) * (y[0] + y[1]) / (q * cfg.sqrt_y_product() * T::lit(4.0));
    let second = (q2 - cone::<T>()) * (q2 - cone::<T>()) / (q2 * T::lit(4.0));
    -first - second * T::lit(s as f64)
}

/// −(y₁+y₂) / (2√(y₁y₂)).
pub fn delta_n2l2<T: Real>(cfg: &SpectralConfig<T>) -> Cx<T> {
    let y = cfg.y();
    -(y[0] + y[1]) / (cfg.sqrt_y_product() * T::lit(2.0))
}

/// Exponent multiplying arctanh(q x₁/√(y₁y₂)) in the general n = 1, L = 2
/// solution; polynomial solutions need it to be ±1.
pub fn n1_exponent<T: Real>(cfg: &SpectralConfig<T>, delta: Cx<T>) -> Cx<T> {
    let q = cfg.q();
    let y = cfg.y();
    let q2m = q * q - cone::<T>();
    -(q / (q2m * q2m))
        * ((cone::<T>() + q * q) * (y[0] + y[1]) / cfg.sqrt_y_product() + q * delta * T::lit(4.0))
}

/// Exponent of ζ in the general n = 2, L = 2 solution; polynomial
/// solutions need it to be 1.
pub fn n2_exponent<T: Real>(cfg: &SpectralConfig<T>, delta: Cx<T>) -> Cx<T> {
    let q = cfg.q();
    let y = cfg.y();
    let q2 = q * q;
    let sy = y[0] + y[1];
    ((cone::<T>() + q2 * q2) * sy + q2 * cfg.sqrt_y_product() * delta * T::lit(4.0))
        / ((q2 - cone::<T>()) * (q2 - cone::<T>()) * sy)
}

/// ζ(x₁, x₂) = q²(y₁+y₂)(x₁+x₂) − (1+q²)(y₁y₂ + q²x₁x₂).
pub fn zeta<T: Real>(cfg: &SpectralConfig<T>, x1: Cx<T>, x2: Cx<T>) -> Cx<T> {
    let q2 = cfg.q() * cfg.q();
    let y = cfg.y();
    q2 * (y[0] + y[1]) * (x1 + x2) - (cone::<T>() + q2) * (y[0] * y[1] + q2 * x1 * x2)
}

/// (q²x₁² − y₁y₂)^{1/2} exp{s·arctanh(q x₁/√(y₁y₂))} with s from Δ.
pub fn sol_n1_exponential<T: Real>(cfg: &SpectralConfig<T>, delta: Cx<T>, x1: Cx<T>) -> Cx<T> {
    let q = cfg.q();
    let y = cfg.y();
    let sy = cfg.sqrt_y_product();
    let z = q * x1 / sy;
    let xi = cln((cone::<T>() + z) / (cone::<T>() - z)) * T::lit(0.5);
    csqrt(q * q * x1 * x1 - y[0] * y[1]) * cexp(n1_exponent(cfg, delta) * xi)
}

/// κ·exp{e·log ζ} with κ = 1 and e from Δ.
pub fn sol_n2_exponential<T: Real>(cfg: &SpectralConfig<T>, delta: Cx<T>, x1: Cx<T>, x2: Cx<T>) -> Cx<T> {
    cexp(n2_exponent(cfg, delta) * cln(zeta(cfg, x1, x2)))
}

fn require_shape<T: Real>(case: SpecialCase, cfg: &SpectralConfig<T>) -> Result<()> {
    let ok = match case.shape() {
        None => cfg.n == 0,
        Some((n, l)) => cfg.n == n && cfg.l == l,
    };
    if ok {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!(
            "case {case:?} does not apply to n = {}, L = {}",
            cfg.n, cfg.l
        )))
    }
}

/// The printed eigenfunctions and Δ_{L−1} of a special case.
pub fn special_solutions<T: Real>(case: SpecialCase, cfg: &SpectralConfig<T>) -> Result<Vec<SpecialSolution<T>>> {
    require_shape(case, cfg)?;
    let q = cfg.q();
    Ok(match case {
        SpecialCase::N0 => vec![SpecialSolution {
            fbar: MultiPoly::constant(0, cfg.l - 1, cone()),
            delta: delta_n0(cfg),
        }],
        SpecialCase::N1L2 => {
            let sy = cfg.sqrt_y_product();
            // exponent +1 gives q x₁ + √Y, exponent −1 gives q x₁ − √Y
            [(1, sy), (-1, -sy)]
                .into_iter()
                .map(|(s, c0)| SpecialSolution {
                    fbar: MultiPoly::from_coeffs(1, 1, vec![c0, q]).expect("two coefficients"),
                    delta: delta_n1l2(cfg, s),
                })
                .collect()
        }
        SpecialCase::N2L2 => {
            let q2 = q * q;
            let y = cfg.y();
            let lin = q2 * (y[0] + y[1]);
            let coeffs = vec![
                -(cone::<T>() + q2) * y[0] * y[1],
                lin,
                lin,
                -(cone::<T>() + q2) * q2,
            ];
            vec![SpecialSolution {
                fbar: MultiPoly::from_coeffs(2, 1, coeffs).expect("four coefficients"),
                delta: delta_n2l2(cfg),
            }]
        }
    })
}

/// The joint-spectrum Δ_{L−1} nearest to `delta`, with its relative distance.
pub fn nearest_joint_delta<T: Real>(family: &OmegaFamily<T>, delta: Cx<T>) -> (Cx<T>, T) {
    let k = family.cfg.l - 1;
    family
        .joint
        .deltas
        .iter()
        .map(|d| (d[k], cabs(d[k] - delta) / cabs(delta).max(T::lit(1e-30))))
        .fold((czero(), T::lit(f64::INFINITY)), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Worst relative deviation of f/g over the pairs from its value at the
/// first pair; zero when f is a constant multiple of g.
pub fn ratio_spread<T: Real>(vals: &[(Cx<T>, Cx<T>)]) -> T {
    let r0 = vals[0].0 / vals[0].1;
    vals.iter()
        .fold(T::zero(), |acc, (f, g)| acc.max(cabs(*f / *g - r0) / cabs(r0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type C = Cx<f64>;

    fn cfg(l: usize, n: usize, seed: u64) -> SpectralConfig<f64> {
        SpectralConfig::random(l, n, seed).unwrap()
    }

    #[test]
    fn geometric_sums() {
        let q: C = cx(1.3, 0.4);
        for l in -3..8 {
            let a = geometric_sum(q, l);
            let b = geometric_closed(q, l);
            assert!(cabs(a - b) < 1e-12 * cabs(a).max(1.0));
        }
        assert_eq!(geometric_sum(q, -1), czero());
    }

    #[test]
    fn elementary_symmetric_sums() {
        let v: Vec<C> = vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)];
        assert_eq!(elementary_symmetric(&v, 0), cx(1.0, 0.0));
        assert_eq!(elementary_symmetric(&v, 1), cx(6.0, 0.0));
        assert_eq!(elementary_symmetric(&v, 2), cx(11.0, 0.0));
        assert_eq!(elementary_symmetric(&v, 3), cx(6.0, 0.0));
        assert_eq!(elementary_symmetric(&v, 4), czero());
        assert_eq!(elementary_symmetric::<f64>(&[], 0), cx(1.0, 0.0));
    }

    #[test]
    fn psi_branches_partition_the_grid() {
        for big_l in 2..=7 {
            for n in 1..=big_l {
                for l in 0..n {
                    let t = big_l as i64 - (n as i64 + 1) + 2 * l as i64;
                    for d in 0..=big_l {
                        let b = psi_branch(l, d, big_l, n);
                        let expect = match (d as i64).cmp(&t) {
                            std::cmp::Ordering::Greater => PsiBranch::Above,
                            std::cmp::Ordering::Less => PsiBranch::Below,
                            std::cmp::Ordering::Equal if big_l >= 5 => PsiBranch::DiagonalLong,
                            std::cmp::Ordering::Equal => PsiBranch::DiagonalShort,
                        };
                        assert_eq!(b, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn potential_without_excitations() {
        let c = cfg(3, 0, 31);
        assert!(cabs(eval_v(&c, &[]) - delta_n0(&c)) < 1e-14);
        // the Σx part carries (q−1)²
        let mut c1 = cfg(3, 2, 32);
        c1.gamma = cx(0.0, 0.0);
        let a = eval_v(&c1, &[cx(0.3, 0.1), cx(-0.7, 0.2)]);
        let b = eval_v(&c1, &[cx(1.3, 0.1), cx(0.2, -0.9)]);
        assert!(cabs(a - b) < 1e-14);
    }

    #[test]
    fn two_by_two_potential_is_constant_and_q_ratio() {
        let c = cfg(2, 2, 33);
        let xs: Vec<C> = vec![cx(0.4, 0.3), cx(-0.8, 0.5)];
        let ys: Vec<C> = vec![cx(1.4, -0.3), cx(0.1, 0.6)];
        assert!(cabs(eval_v(&c, &xs) - eval_v(&c, &ys)) < 1e-13);
        let ratio = eval_q(&c, 0, &xs).unwrap() / eval_q(&c, 1, &xs).unwrap();
        assert!(cabs(ratio + xs[0] / xs[1]) < 1e-12);
    }

    #[test]
    fn q_pole_is_detected() {
        let c = cfg(3, 2, 34);
        let x: C = cx(0.5, 0.5);
        assert!(matches!(eval_q(&c, 0, &[x, x]), Err(LabError::SingularCoefficient { .. })));
    }

    #[test]
    fn special_cases_solve_the_equation() {
        for l in 2..=5 {
            let c = cfg(l, 0, 35);
            let sol = special_solutions(SpecialCase::N0, &c).unwrap();
            assert!(closedform_residual(&c, &sol[0].fbar, sol[0].delta).unwrap() < 1e-12);
        }
        let c = cfg(2, 1, 36);
        for sol in special_solutions(SpecialCase::N1L2, &c).unwrap() {
            assert!(closedform_residual(&c, &sol.fbar, sol.delta).unwrap() < 1e-12);
            assert!(closedform_residual(&c, &sol.fbar, sol.delta + 1.0).unwrap() > 1e-3);
        }
        let c = cfg(2, 2, 37);
        let sol = special_solutions(SpecialCase::N2L2, &c).unwrap().remove(0);
        assert!(closedform_residual(&c, &sol.fbar, sol.delta).unwrap() < 1e-12);
        assert!(cabs(n2_exponent(&c, sol.delta) - 1.0) < 1e-12);
        assert!(special_solutions(SpecialCase::N2L2, &cfg(3, 2, 1)).is_err());
    }

    #[test]
    fn exponential_forms_collapse_to_polynomials() {
        let c = cfg(2, 1, 38);
        let sols = special_solutions(SpecialCase::N1L2, &c).unwrap();
        let pts: Vec<C> = (0..6).map(|k| cx(0.05 + 0.02 * k as f64, 0.03 - 0.01 * k as f64)).collect();
        for (sol, s) in sols.iter().zip([1.0, -1.0]) {
            assert!(cabs(n1_exponent(&c, sol.delta) - s) < 1e-12);
            // (F_exp / F)² is branch-free and constant exactly on polynomial solutions
            let vals: Vec<(C, C)> = pts
                .iter()
                .map(|x| {
                    let f = sol_n1_exponential(&c, sol.delta, *x);
                    let g = sol.fbar.eval(&[*x]);
                    (f * f, g * g)
                })
                .collect();
            assert!(ratio_spread(&vals) < 1e-10);
            let off: Vec<(C, C)> = pts
                .iter()
                .map(|x| {
                    let f = sol_n1_exponential(&c, sol.delta + 0.3, *x);
                    let g = sol.fbar.eval(&[*x]);
                    (f * f, g * g)
                })
                .collect();
            assert!(ratio_spread(&off) > 1e-4);
        }
        let c = cfg(2, 2, 39);
        let sol = special_solutions(SpecialCase::N2L2, &c).unwrap().remove(0);
        let vals: Vec<(C, C)> = (0..6)
            .map(|k| {
                let (x1, x2) = (cx(0.3 + 0.1 * k as f64, 0.2), cx(-0.4, 0.1 * k as f64));
                (sol_n2_exponential(&c, sol.delta, x1, x2), sol.fbar.eval(&[x1, x2]))
            })
            .collect();
        assert!(ratio_spread(&vals) < 1e-10);
    }

    #[test]
    fn closed_form_matches_extracted_operator() {
        for (n, l) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
            let c = cfg(l, n, 40 + n as u64);
            let cmp = compare_omega_closedform(&c).unwrap();
            assert!(cmp.difference < 1e-8, "(n,L)=({n},{l}): {}", cmp.difference);
            assert!(cmp.closed.excess < 1e-9);
        }
    }
}
