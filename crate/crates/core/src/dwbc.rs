//! Domain-wall partition function Z = ⟨⇓|B(λ₁)⋯B(λ_L)|0⟩, its polynomial
//! part Z̄ and the homogeneous order-(L−1) equation it satisfies.

use crate::config::SpectralConfig;
use crate::dense::vmax_abs;
use crate::error::{LabError, Result};
use crate::functional::{rapidity_of, PolyFit};
use crate::omega::{abar, bbar};
use crate::poly::{held_out_error, sample_and_interpolate, MultiPoly, TensorGrid};
use crate::reduction::{build_psi, upsilon_residual, CoefficientSource, ReductionSystem};
use crate::rng::LabRng;
use crate::scalar::{cabs, cexp, cone, czero, factorial, Cx, Real};
use crate::yb;

/// (a, b, c) at one vertex.
type Weights<T> = (Cx<T>, Cx<T>, Cx<T>);

/// Dense oracle cap on L.
pub const MAX_DWBC_L: usize = 6;

fn check_cap(l: usize) -> Result<()> {
    if l > MAX_DWBC_L {
        return Err(LabError::Capacity {
            what: "domain-wall L",
            value: l,
            cap: MAX_DWBC_L,
        });
    }
    Ok(())
}

fn check_count<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<()> {
    if lambdas.len() != cfg.l {
        return Err(LabError::InvalidArgument(format!(
            "domain-wall partition function takes L = {} rapidities, got {}",
            cfg.l,
            lambdas.len()
        )));
    }
    Ok(())
}

/// ⟨⇓|B(λ₁)⋯B(λ_L)|0⟩ from dense B-operators.
pub fn dwbc_partition<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<Cx<T>> {
    check_cap(cfg.l)?;
    check_count(lambdas, cfg)?;
    let v = yb::b_product_on_vacuum(lambdas, cfg)?;
    Ok(v[cfg.dim() - 1])
}

/// Vertex weight with auxiliary arrows `left`, `right` and site arrows
/// `below` (before the row acts) and `above` (after); 0 is up, 1 is down.
/// The nonzero entries are the three Boltzmann weights of the R-matrix.
fn vertex<T: Real>(left: u8, right: u8, below: u8, above: u8, w: Weights<T>) -> Cx<T> {
    let (a, b, c) = w;
    if left + above != right + below {
        czero()
    } else if left == right && below == above {
        if left == below {
            a
        } else {
            b
        }
    } else {
        c
    }
}

/// Sum over arrow configurations of the L×L lattice with domain-wall
/// boundaries: every row enters up on the left and leaves down on the right,
/// sites start up and end down. Row `a` carries rapidity λ_a and acts after
/// rows a+1 … L.
pub fn configuration_sum<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<Cx<T>> {
    check_count(lambdas, cfg)?;
    if cfg.l > 5 {
        return Err(LabError::Capacity {
            what: "configuration enumeration L",
            value: cfg.l,
            cap: 5,
        });
    }
    let l = cfg.l;
    let weights: Vec<Vec<Weights<T>>> = lambdas
        .iter()
        .map(|lam| cfg.mu.iter().map(|mu| yb::weights(*lam - *mu, cfg.gamma)).collect())
        .collect();

    // one row: all horizontal paths from up to down given the site arrows
    fn row<T: Real>(
        site: usize,
        left: u8,
        below: &[u8],
        above: &mut Vec<u8>,
        w: &[Weights<T>],
        acc: Cx<T>,
        out: &mut Vec<(Vec<u8>, Cx<T>)>,
    ) {
        if site == below.len() {
            if left == 1 {
                out.push((above.clone(), acc));
            }
            return;
        }
        for right in 0..2u8 {
            // arrow conservation: left + above = right + below
            let flow = right + below[site];
            if flow < left || flow - left > 1 {
                continue;
            }
            let next = flow - left;
            let v = vertex(left, right, below[site], next, w[site]);
            if v == czero() {
                continue;
            }
            above.push(next);
            row(site + 1, right, below, above, w, acc * v, out);
            above.pop();
        }
    }

    let mut states: Vec<(Vec<u8>, Cx<T>)> = vec![(vec![0; l], cone())];
    for a in (0..l).rev() {
        let mut next = Vec::new();
        for (below, amp) in &states {
            row(0, 0, below, &mut Vec::with_capacity(l), &weights[a], *amp, &mut next);
        }
        states = next;
    }
    Ok(states
        .into_iter()
        .filter(|(s, _)| s.iter().all(|v| *v == 1))
        .fold(czero(), |acc, (_, amp)| acc + amp))
}

/// 𝒱^{DW} = Σ_i ā(x_i, y_i).
pub fn v_dw<T: Real>(cfg: &SpectralConfig<T>, xs: &[Cx<T>]) -> Cx<T> {
    let q = cfg.q();
    xs.iter()
        .zip(cfg.y())
        .fold(czero(), |acc, (x, y)| acc + abar(*x, y, q))
}

/// 𝒬^{DW}_i = −1/(L−1)! ∏_j ā(x_i, y_j) ∏_{j≠i} ā(x_j, x_i)/b̄(x_j, x_i).
pub fn q_dw<T: Real>(cfg: &SpectralConfig<T>, i: usize, xs: &[Cx<T>]) -> Result<Cx<T>> {
    let q = cfg.q();
    let xi = xs[i];
    let mut out = cfg.y().into_iter().fold(cone::<T>(), |acc, y| acc * abar(xi, y, q));
    for (j, xj) in xs.iter().enumerate() {
        if j == i {
            continue;
        }
        let gap = bbar(*xj, xi);
        if cabs(gap) < T::lit(1e-10) * cabs(xi).max(T::one()) {
            return Err(LabError::SingularCoefficient {
                i,
                j,
                gap: cabs(gap).as_f64(),
            });
        }
        out *= abar(*xj, xi, q) / gap;
    }
    Ok(-out / factorial::<T>(cfg.l - 1))
}

/// Z̄(x) = ∏ e^{(L−1)λ_i} Z(λ) fitted on K^{L}[x] in L variables and
/// truncated to K^{L−1}[x].
pub fn extract_zbar<T: Real>(cfg: &SpectralConfig<T>) -> Result<PolyFit<T>> {
    check_cap(cfg.l)?;
    let l = cfg.l;
    let pref = T::lit(l as f64 - 1.0);
    let mut eval = |xs: &[Cx<T>]| -> Result<Cx<T>> {
        let lambdas: Vec<Cx<T>> = xs.iter().map(|x| rapidity_of(*x)).collect();
        let shift = lambdas.iter().fold(czero(), |acc, lam| acc + *lam) * pref;
        Ok(dwbc_partition(&lambdas, cfg)? * cexp(shift))
    };
    let grid = TensorGrid::standard(l, l + 1);
    let fit = sample_and_interpolate(&grid, &mut eval)?;
    let excess = fit.poly.excess_above(l - 1);
    let poly = fit.poly.truncate(l - 1);
    let mut rng = LabRng::new(cfg.seed ^ 0xd3);
    let probes: Vec<Vec<Cx<T>>> = (0..3).map(|_| rng.spread_point(l, 1.1, 0.1)).collect();
    let held_out = held_out_error(&poly, &probes, &mut eval)?;
    Ok(PolyFit {
        poly,
        excess,
        held_out,
        condition: fit.condition,
    })
}

/// |𝒱^{DW}Z̄ + Σ𝒬^{DW}_i∂_i^{L−1}Z̄| relative to the largest term, worst
/// over `points` random points with distinct coordinates.
pub fn dwbc_pde_residual<T: Real>(cfg: &SpectralConfig<T>, zbar: &MultiPoly<T>, points: usize) -> Result<T> {
    let l = cfg.l;
    let mut rng = LabRng::new(cfg.seed ^ 0xd4);
    let mut worst = T::zero();
    for _ in 0..points {
        let pt = rng.spread_point::<T>(l, 1.1, 0.15);
        let mut terms = vec![v_dw(cfg, &pt) * zbar.eval(&pt)];
        for i in 0..l {
            terms.push(q_dw(cfg, i, &pt)? * zbar.partial_derivative(i, l - 1).eval(&pt));
        }
        let total = terms.iter().fold(czero::<T>(), |a, t| a + *t);
        let scale = terms.iter().fold(T::zero(), |a, t| a.max(cabs(*t)));
        worst = worst.max(if scale > T::zero() { cabs(total) / scale } else { cabs(total) });
    }
    Ok(worst)
}

/// Υ_DW: the reduction with Δ → 0, 𝒱 → 𝒱^{DW}, 𝒬_i → 𝒬^{DW}_i, n → L.
pub fn dwbc_upsilon<T: Real>(cfg: &SpectralConfig<T>) -> Result<ReductionSystem<T>> {
    ReductionSystem::new(CoefficientSource::DomainWall { cfg: cfg.clone() })
}

/// Worst relative row of Υ_DW φ⃗ over random points, φ⃗ built from Z̄.
pub fn dwbc_upsilon_residual<T: Real>(cfg: &SpectralConfig<T>, zbar: &MultiPoly<T>, points: usize) -> Result<T> {
    let sys = dwbc_upsilon(cfg)?;
    let phi = build_psi(zbar, cfg.l)?;
    let mut rng = LabRng::new(cfg.seed ^ 0xd5);
    let mut worst = T::zero();
    for _ in 0..points {
        let pt = rng.spread_point::<T>(cfg.l, 1.1, 0.15);
        worst = worst.max(upsilon_residual(&sys, &phi, &pt)?.max_relative());
    }
    Ok(worst)
}

/// Largest component of B(λ₁)⋯B(λ_L)|0⟩ outside ⟨⇓|, relative; zero by
/// S^z counting.
pub fn off_target_weight<T: Real>(lambdas: &[Cx<T>], cfg: &SpectralConfig<T>) -> Result<T> {
    let mut v = yb::b_product_on_vacuum(lambdas, cfg)?;
    let last = cabs(v[cfg.dim() - 1]);
    let n = v.len();
    v[n - 1] = czero();
    Ok(vmax_abs(&v) / last.max(T::lit(1e-300)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::random_rapidities;
    use crate::scalar::{csinh, cx};

    type C = Cx<f64>;

    fn cfg(l: usize, seed: u64) -> SpectralConfig<f64> {
        SpectralConfig::random(l, l, seed).unwrap()
    }

    #[test]
    fn single_site_is_c_weight() {
        let c = cfg(1, 41);
        let z = dwbc_partition(&[cx(0.3, 0.2)], &c).unwrap();
        assert!(cabs(z - csinh(c.gamma)) < 1e-14);
        assert!(cabs(configuration_sum(&[cx(0.3, 0.2)], &c).unwrap() - z) < 1e-14);
    }

    #[test]
    fn symmetric_in_rapidities() {
        let c = cfg(3, 42);
        let r: Vec<C> = random_rapidities(3, 43);
        let z = dwbc_partition(&r, &c).unwrap();
        let zp = dwbc_partition(&[r[2], r[0], r[1]], &c).unwrap();
        assert!(cabs(z - zp) < 1e-12 * cabs(z));
        assert!(off_target_weight(&r, &c).unwrap() < 1e-14);
    }

    #[test]
    fn two_by_two_by_hand() {
        // w(a, j) = weights(λ_a − μ_j). Row 2 acts first and flips either
        // site 2 (a then c) or site 1 (c then b); row 1 flips the other site.
        let c = cfg(2, 44);
        let r: Vec<C> = vec![cx(0.2, 0.1), cx(-0.5, 0.3)];
        let w = |a: usize, j: usize| yb::weights(r[a] - c.mu[j], c.gamma);
        let first = w(1, 0).0 * w(1, 1).2 * w(0, 0).2 * w(0, 1).0;
        let second = w(1, 0).2 * w(1, 1).1 * w(0, 0).1 * w(0, 1).2;
        let expect = first + second;
        let z = dwbc_partition(&r, &c).unwrap();
        assert!(cabs(z - expect) < 1e-12 * cabs(z));
        assert!(cabs(configuration_sum(&r, &c).unwrap() - z) < 1e-12 * cabs(z));
    }

    #[test]
    fn configuration_sum_matches_b_products() {
        for l in 2..=4 {
            let c = cfg(l, 45 + l as u64);
            let r: Vec<C> = random_rapidities(l, 46);
            let z = dwbc_partition(&r, &c).unwrap();
            assert!(cabs(configuration_sum(&r, &c).unwrap() - z) < 1e-10 * cabs(z));
        }
    }

    #[test]
    fn polynomial_part_solves_the_equation() {
        for l in 2..=3 {
            let c = cfg(l, 47);
            let fit = extract_zbar(&c).unwrap();
            assert!(fit.excess < 1e-9 && fit.held_out < 1e-9);
            assert!(fit.poly.symmetry_defect() < 1e-9);
            let r = dwbc_pde_residual(&c, &fit.poly, 10).unwrap();
            assert!(r < 1e-9, "L={l}: {r}");
            let scaled = fit.poly.scale(cx(7.0, 0.0));
            assert!((dwbc_pde_residual(&c, &scaled, 10).unwrap() - r).abs() < 1e-12);
        }
        let c = cfg(3, 48);
        let fit = extract_zbar(&c).unwrap();
        assert!(dwbc_upsilon_residual(&c, &fit.poly, 10).unwrap() < 1e-8);
        // (L−2)·L + 1 with L = 3
        assert_eq!(dwbc_upsilon(&c).unwrap().dim, 4);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut c = SpectralConfig::<f64>::random(7, 7, 49).unwrap();
        c.max_l = 12;
        let r: Vec<C> = random_rapidities(7, 50);
        assert!(matches!(dwbc_partition(&r, &c), Err(LabError::Capacity { .. })));
    }
}
