//! Projections F_n = ⟨Λ|B(λ₁)⋯B(λ_n)|0⟩ of transfer-matrix eigenvectors,
//! the functional equation they satisfy, and their polynomial parts.

use crate::config::SpectralConfig;
use crate::dense::{basis_vector, bilinear, max_abs, vmax_abs};
use crate::error::{LabError, Result};
use crate::poly::{held_out_error, sample_and_interpolate, MultiPoly, TensorGrid};
use crate::rng::LabRng;
use crate::scalar::{cabs, cexp, cln, czero, Cx, Real};
use crate::yb::{self, EigenPair, SectorSpectrum};

/// Node count per axis used for every polynomial fit here: one more than
/// the expected degree, so the top coefficient doubles as a degree check.
fn fit_nodes(l: usize) -> usize {
    l + 1
}

/// λ with e^{2λ} = x.
pub fn rapidity_of<T: Real>(x: Cx<T>) -> Cx<T> {
    cln(x) * T::lit(0.5)
}

/// One transfer-matrix eigenpair selected from a sector spectrum.
#[derive(Debug, Clone)]
pub struct EigenChoice<T: Real> {
    pub sector: usize,
    pub index: usize,
    pub pair: EigenPair<T>,
}

impl<T: Real> EigenChoice<T> {
    pub fn from_spectrum(spec: &SectorSpectrum<T>, index: usize) -> Result<Self> {
        let pair = spec.pairs.get(index).cloned().ok_or_else(|| {
            LabError::InvalidArgument(format!(
                "eigenpair index {index} outside sector {} of size {}",
                spec.sector,
                spec.pairs.len()
            ))
        })?;
        Ok(Self {
            sector: spec.sector,
            index,
            pair,
        })
    }

    /// All eigenpairs of a sector.
    pub fn all(cfg: &SpectralConfig<T>, sector: usize) -> Result<Vec<Self>> {
        let spec = yb::spectrum(cfg, sector, yb::default_probes())?;
        (0..spec.pairs.len())
            .map(|k| Self::from_spectrum(&spec, k))
            .collect()
    }

    pub fn lambda(&self, lambda: Cx<T>, cfg: &SpectralConfig<T>) -> Result<Cx<T>> {
        self.pair.eigenvalue(lambda, cfg)
    }

    /// Worst relative residual of ⟨Λ|T(λ) = Λ(λ)⟨Λ| and T(λ)|Λ⟩ = Λ(λ)|Λ⟩
    /// over the given spectral parameters.
    pub fn consistency(&self, cfg: &SpectralConfig<T>, points: &[Cx<T>]) -> Result<T> {
        let mut worst = T::zero();
        let (r, w) = (&self.pair.right, &self.pair.left);
        for p in points {
            let t = yb::transfer(*p, cfg)?.mat;
            let theta = self.lambda(*p, cfg)?;
            let scale = max_abs(&t).max(cabs(theta));
            let right = vmax_abs(&(&t * r - r * theta)) / (scale * vmax_abs(r));
            let left = vmax_abs(&(t.transpose() * w - w * theta)) / (scale * vmax_abs(w));
            worst = worst.max(right).max(left);
        }
        Ok(worst)
    }
}

/// Evaluates F_n for one eigenvector.
#[derive(Debug, Clone)]
pub struct FnSampler<T: Real> {
    pub cfg: SpectralConfig<T>,
    pub eig: EigenChoice<T>,
}

impl<T: Real> FnSampler<T> {
    pub fn new(cfg: SpectralConfig<T>, eig: EigenChoice<T>) -> Self {
        Self { cfg, eig }
    }
}

/// ⟨Λ|B(λ₁)⋯B(λ_n)|0⟩. A product whose length differs from the sector of
/// the eigenvector vanishes identically by S^z counting and is reported as
/// an error instead of a silent zero.
pub fn compute_fn<T: Real>(s: &FnSampler<T>, lambdas: &[Cx<T>]) -> Result<Cx<T>> {
    if lambdas.len() != s.eig.sector {
        return Err(LabError::SectorMismatch {
            eigen: s.eig.sector,
            product: lambdas.len(),
        });
    }
    let v = if lambdas.is_empty() {
        basis_vector(s.cfg.dim(), 0)
    } else {
        yb::b_product_on_vacuum(lambdas, &s.cfg)?
    };
    Ok(bilinear(&s.eig.pair.left, &v))
}

/// Coefficients of the functional equation
/// J₀ F(λ₁…λ_n) − Σ_i K_i F(…λ₀ in slot i…) = Λ(λ₀) F(λ₁…λ_n).
#[derive(Debug, Clone)]
pub struct FzCoefficients<T: Real> {
    pub j0: Cx<T>,
    /// K_{λ_i}, in the order of the rapidities.
    pub k: Vec<Cx<T>>,
}

pub fn fz_coefficients<T: Real>(
    lambda0: Cx<T>,
    lambdas: &[Cx<T>],
    cfg: &SpectralConfig<T>,
) -> Result<FzCoefficients<T>> {
    let co = yb::off_coefficients(lambda0, lambdas, cfg.gamma)?;
    let (pa0, pd0) = yb::vacuum_products(lambda0, cfg);
    let j0 = pa0 * co.ma0 + pd0 * co.md0;
    let k = lambdas
        .iter()
        .enumerate()
        .map(|(i, li)| {
            let (pa, pd) = yb::vacuum_products(*li, cfg);
            pa * co.ma[i] + pd * co.md[i]
        })
        .collect();
    Ok(FzCoefficients { j0, k })
}

/// |J₀F − ΣK_iF_i − ΛF| over the largest of the individual terms.
pub fn check_fz_residual<T: Real>(s: &FnSampler<T>, lambda0: Cx<T>, lambdas: &[Cx<T>]) -> Result<T> {
    let co = fz_coefficients(lambda0, lambdas, &s.cfg)?;
    let f = compute_fn(s, lambdas)?;
    let lam = s.eig.lambda(lambda0, &s.cfg)?;
    let mut terms = vec![co.j0 * f, -(lam * f)];
    for (i, k) in co.k.iter().enumerate() {
        terms.push(-(*k * compute_fn(s, &yb::replace_with(lambdas, i, lambda0))?));
    }
    let total = terms.iter().fold(czero(), |acc, t| acc + *t);
    let scale = terms.iter().fold(T::zero(), |acc, t| acc.max(cabs(*t)));
    Ok(if scale > T::zero() { cabs(total) / scale } else { cabs(total) })
}

/// A polynomial fitted from samples, with its diagnostics.
#[derive(Debug, Clone)]
pub struct PolyFit<T: Real> {
    pub poly: MultiPoly<T>,
    /// Largest coefficient above the expected degree, relative.
    pub excess: T,
    /// Relative mismatch at fresh random points.
    pub held_out: T,
    /// Worst per-axis Vandermonde condition number.
    pub condition: T,
}

fn random_points<T: Real>(nvars: usize, count: usize, seed: u64) -> Vec<Vec<Cx<T>>> {
    let mut rng = LabRng::new(seed);
    (0..count)
        .map(|_| rng.spread_point::<T>(nvars, 1.1, 0.1))
        .collect()
}

/// F̄_n(x) = ∏ e^{(L−1)λ_i} F_n(λ) with x_i = e^{2λ_i}, fitted on K^{L}[x]
/// and truncated to K^{L−1}[x]; the discarded top layer is `excess`.
pub fn extract_fbar<T: Real>(s: &FnSampler<T>) -> Result<PolyFit<T>> {
    let l = s.cfg.l;
    let n = s.eig.sector;
    let pref = T::lit(l as f64 - 1.0);
    let mut eval = |xs: &[Cx<T>]| -> Result<Cx<T>> {
        let lambdas: Vec<Cx<T>> = xs.iter().map(|x| rapidity_of(*x)).collect();
        let shift = lambdas.iter().fold(czero(), |acc, lam| acc + *lam) * pref;
        Ok(compute_fn(s, &lambdas)? * cexp(shift))
    };
    let grid = TensorGrid::standard(n, fit_nodes(l));
    let fit = sample_and_interpolate(&grid, &mut eval)?;
    let excess = fit.poly.excess_above(l - 1);
    let poly = fit.poly.truncate(l - 1);
    let held_out = held_out_error(&poly, &random_points(n, 3, s.cfg.seed ^ 0x5eed), &mut eval)?;
    Ok(PolyFit {
        poly,
        excess,
        held_out,
        condition: fit.condition,
    })
}

/// Λ̄(x₀) = e^{Lλ₀} Λ(λ₀) as a polynomial of degree L in x₀ = e^{2λ₀};
/// `poly` has one variable and its coefficients are Δ₀ … Δ_L.
pub fn lambda_bar<T: Real>(eig: &EigenChoice<T>, cfg: &SpectralConfig<T>) -> Result<PolyFit<T>> {
    let l = cfg.l;
    let mut eval = |x: &[Cx<T>]| -> Result<Cx<T>> {
        let lam = rapidity_of(x[0]);
        Ok(eig.lambda(lam, cfg)? * cexp(lam * T::lit(l as f64)))
    };
    let grid = TensorGrid::circles(l + 2, &[1.3], &[0.23]);
    let fit = sample_and_interpolate(&grid, &mut eval)?;
    let excess = fit.poly.excess_above(l);
    let poly = fit.poly.truncate(l);
    let held_out = held_out_error(&poly, &random_points(1, 3, cfg.seed ^ 0x1ab), &mut eval)?;
    Ok(PolyFit {
        poly,
        excess,
        held_out,
        condition: fit.condition,
    })
}

/// Δ_k: the coefficients of Λ̄(x₀).
pub fn delta_coefficients<T: Real>(fit: &PolyFit<T>) -> Vec<Cx<T>> {
    fit.poly.coeffs().to_vec()
}

/// Degree check of one matrix element of e^{(L−1)λ}B(λ) as a function of
/// x = e^{2λ}: fitted with bound L, the x^L coefficient must vanish.
pub fn b_entry_fit<T: Real>(cfg: &SpectralConfig<T>, row: usize, col: usize) -> Result<PolyFit<T>> {
    let l = cfg.l;
    let mut eval = |x: &[Cx<T>]| -> Result<Cx<T>> {
        let lam = rapidity_of(x[0]);
        let b = yb::monodromy(lam, cfg)?.b;
        Ok(b[(row, col)] * cexp(lam * T::lit(l as f64 - 1.0)))
    };
    let grid = TensorGrid::circles(fit_nodes(l), &[1.2], &[0.41]);
    let fit = sample_and_interpolate(&grid, &mut eval)?;
    let excess = fit.poly.excess_above(l - 1);
    let poly = fit.poly.truncate(l - 1);
    let held_out = held_out_error(&poly, &random_points(1, 3, cfg.seed ^ 0xb), &mut eval)?;
    Ok(PolyFit {
        poly,
        excess,
        held_out,
        condition: fit.condition,
    })
}

/// Rapidities with pairwise |sinh| gaps of at least 0.1, drawn from `seed`.
pub fn random_rapidities<T: Real>(count: usize, seed: u64) -> Vec<Cx<T>> {
    LabRng::new(seed).distinct(count, 0.1)
}
