//! First-order form of the order-(L−1) equations: the block vector
//! ψ⃗ = (ψ₀; ψ^{(1)}; …; ψ^{(L−2)}) with ψ_i^{(k)} = ∂_i^k ψ₀ and the operator
//! matrix Υ with Υψ⃗ = 0.
//!
//! Row 0 is (𝒱 − Δ)ψ₀ + Σ_i 𝒬_i ∂_i ψ_i^{(L−2)}: 𝒱 is the potential and 𝒬_i
//! multiplies the derivative, exactly as in the scalar equation. The other
//! rows are ∂_i ψ_i^{(k−1)} − ψ_i^{(k)} (with ψ_i^{(0)} = ψ₀).

use crate::config::SpectralConfig;
use crate::dwbc;
use crate::error::{LabError, Result};
use crate::pde;
use crate::poly::MultiPoly;
use crate::scalar::{cabs, czero, Cx, Real};

/// Where the coefficient functions of row 0 come from.
#[derive(Debug, Clone)]
pub enum CoefficientSource<T: Real> {
    /// Transfer-matrix equation in `cfg.n` variables with eigenvalue Δ_{L−1}.
    Transfer { cfg: SpectralConfig<T>, delta: Cx<T> },
    /// Domain-wall equation in L variables, Δ = 0.
    DomainWall { cfg: SpectralConfig<T> },
}

impl<T: Real> CoefficientSource<T> {
    pub fn cfg(&self) -> &SpectralConfig<T> {
        match self {
            Self::Transfer { cfg, .. } | Self::DomainWall { cfg } => cfg,
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Self::Transfer { cfg, .. } => cfg.n,
            Self::DomainWall { cfg } => cfg.l,
        }
    }

    pub fn delta(&self) -> Cx<T> {
        match self {
            Self::Transfer { delta, .. } => *delta,
            Self::DomainWall { .. } => czero(),
        }
    }

    pub fn potential(&self, xs: &[Cx<T>]) -> Cx<T> {
        match self {
            Self::Transfer { cfg, .. } => pde::eval_v(cfg, xs),
            Self::DomainWall { cfg } => dwbc::v_dw(cfg, xs),
        }
    }

    pub fn derivative_coeff(&self, i: usize, xs: &[Cx<T>]) -> Result<Cx<T>> {
        match self {
            Self::Transfer { cfg, .. } => pde::eval_q(cfg, i, xs),
            Self::DomainWall { cfg } => dwbc::q_dw(cfg, i, xs),
        }
    }
}

/// One operator entry of Υ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpsEntry {
    Zero,
    /// Multiplication by 𝒱 − Δ.
    Potential,
    /// ±1.
    Identity(i8),
    /// ∂_i.
    Derivative(usize),
    /// 𝒬_i ∂_i.
    CoeffDerivative(usize),
}

/// Block sizes and padding of Υ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeAudit {
    pub dim: usize,
    /// 1 followed by L−2 blocks of size n.
    pub blocks: Vec<usize>,
    /// Zero entries ahead of ω⃗₀ in row 0 (and below ∇⃗₀ in column 0).
    pub padding: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionSystem<T: Real> {
    pub source: CoefficientSource<T>,
    pub n: usize,
    pub l: usize,
    pub dim: usize,
    pub matrix: Vec<Vec<UpsEntry>>,
}

impl<T: Real> ReductionSystem<T> {
    /// Requires L ≥ 3; for L = 2 the equation is already first order.
    pub fn new(source: CoefficientSource<T>) -> Result<Self> {
        let l = source.cfg().l;
        let n = source.nvars();
        if l < 3 {
            return Err(LabError::UnsupportedShape(format!(
                "first-order reduction needs L >= 3, got L = {l}"
            )));
        }
        let dim = (l - 2) * n + 1;
        // column of ψ_i^{(k)}, k ≥ 1
        let col = |k: usize, i: usize| 1 + (k - 1) * n + i;
        let mut m = vec![vec![UpsEntry::Zero; dim]; dim];
        m[0][0] = UpsEntry::Potential;
        for i in 0..n {
            m[0][col(l - 2, i)] = UpsEntry::CoeffDerivative(i);
            // ∇⃗₀ in column 0, −1 on the diagonal
            m[col(1, i)][0] = UpsEntry::Derivative(i);
            for k in 1..=l - 2 {
                m[col(k, i)][col(k, i)] = UpsEntry::Identity(-1);
                if k < l - 2 {
                    m[col(k + 1, i)][col(k, i)] = UpsEntry::Derivative(i);
                }
            }
        }
        Ok(Self {
            source,
            n,
            l,
            dim,
            matrix: m,
        })
    }

    pub fn shape(&self) -> ShapeAudit {
        let mut blocks = vec![1];
        blocks.extend(std::iter::repeat_n(self.n, self.l - 2));
        ShapeAudit {
            dim: self.dim,
            blocks,
            padding: self.n * (self.l - 3),
        }
    }
}

/// ψ⃗ built from F̄ by repeated differentiation.
pub fn build_psi<T: Real>(fbar: &MultiPoly<T>, l: usize) -> Result<Vec<MultiPoly<T>>> {
    if l < 3 {
        return Err(LabError::UnsupportedShape(format!(
            "first-order reduction needs L >= 3, got L = {l}"
        )));
    }
    let n = fbar.nvars();
    let mut out = vec![fbar.clone()];
    let mut prev: Vec<MultiPoly<T>> = vec![fbar.clone(); n];
    for _ in 1..=l - 2 {
        prev = prev
            .iter()
            .enumerate()
            .map(|(i, p)| p.partial_derivative(i, 1))
            .collect();
        out.extend(prev.iter().cloned());
    }
    Ok(out)
}

/// Rows of Υψ⃗ at one point.
#[derive(Debug, Clone)]
pub struct UpsilonResidual<T: Real> {
    pub rows: Vec<Cx<T>>,
    /// Each row divided by the largest of its terms.
    pub relative: Vec<T>,
}

impl<T: Real> UpsilonResidual<T> {
    pub fn max_relative(&self) -> T {
        self.relative.iter().fold(T::zero(), |a, v| a.max(*v))
    }

    pub fn max_abs(&self) -> T {
        self.rows.iter().fold(T::zero(), |a, v| a.max(cabs(*v)))
    }

    /// Worst of the rows below the first.
    pub fn defining_rows(&self) -> T {
        self.rows.iter().skip(1).fold(T::zero(), |a, v| a.max(cabs(*v)))
    }
}

pub fn upsilon_residual<T: Real>(
    sys: &ReductionSystem<T>,
    psi: &[MultiPoly<T>],
    point: &[Cx<T>],
) -> Result<UpsilonResidual<T>> {
    if psi.len() != sys.dim || point.len() != sys.n {
        return Err(LabError::InvalidArgument(format!(
            "expected {} entries at a point in {} variables",
            sys.dim, sys.n
        )));
    }
    let values: Vec<Cx<T>> = psi.iter().map(|p| p.eval(point)).collect();
    let delta = sys.source.delta();
    let mut rows = Vec::with_capacity(sys.dim);
    let mut relative = Vec::with_capacity(sys.dim);
    for row in &sys.matrix {
        let mut terms = Vec::new();
        for (entry, (p, v)) in row.iter().zip(psi.iter().zip(&values)) {
            let t = match *entry {
                UpsEntry::Zero => continue,
                UpsEntry::Potential => (sys.source.potential(point) - delta) * *v,
                UpsEntry::Identity(s) => *v * T::lit(s as f64),
                UpsEntry::Derivative(i) => p.partial_derivative(i, 1).eval(point),
                UpsEntry::CoeffDerivative(i) => {
                    sys.source.derivative_coeff(i, point)? * p.partial_derivative(i, 1).eval(point)
                }
            };
            terms.push(t);
        }
        let total = terms.iter().fold(czero::<T>(), |a, t| a + *t);
        let scale = terms.iter().fold(T::zero(), |a, t| a.max(cabs(*t)));
        rows.push(total);
        relative.push(if scale > T::zero() { cabs(total) / scale } else { cabs(total) });
    }
    Ok(UpsilonResidual { rows, relative })
}

/// Row 0 of Υψ⃗ minus the direct scalar equation [𝒱 + Σ𝒬_i∂_i^{L−1} − Δ]F̄,
/// relative to the size of the latter's terms.
pub fn pde_row_equivalence<T: Real>(sys: &ReductionSystem<T>, fbar: &MultiPoly<T>, point: &[Cx<T>]) -> Result<T> {
    let psi = build_psi(fbar, sys.l)?;
    let row = upsilon_residual(sys, &psi, point)?.rows[0];
    let f = fbar.eval(point);
    let mut terms = vec![(sys.source.potential(point) - sys.source.delta()) * f];
    for i in 0..sys.n {
        terms.push(sys.source.derivative_coeff(i, point)? * fbar.partial_derivative(i, sys.l - 1).eval(point));
    }
    let direct = terms.iter().fold(czero::<T>(), |a, t| a + *t);
    let scale = terms.iter().fold(T::zero(), |a, t| a.max(cabs(*t))).max(T::lit(1e-300));
    Ok(cabs(row - direct) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::LabRng;
    use crate::scalar::cx;

    fn cfg(l: usize, n: usize, seed: u64) -> SpectralConfig<f64> {
        SpectralConfig::random(l, n, seed).unwrap()
    }

    fn random_poly(n: usize, m: usize, seed: u64) -> MultiPoly<f64> {
        let mut rng = LabRng::new(seed);
        let count = (m + 1).pow(n as u32);
        MultiPoly::from_coeffs(n, m, (0..count).map(|_| rng.complex()).collect()).unwrap()
    }

    #[test]
    fn shapes() {
        let s = ReductionSystem::new(CoefficientSource::Transfer {
            cfg: cfg(3, 1, 1),
            delta: cx(0.0, 0.0),
        })
        .unwrap();
        assert_eq!(s.dim, 2);
        assert_eq!(s.shape().padding, 0);
        let s = ReductionSystem::new(CoefficientSource::Transfer {
            cfg: cfg(4, 2, 2),
            delta: cx(0.0, 0.0),
        })
        .unwrap();
        assert_eq!(s.dim, 5);
        assert_eq!(s.shape().blocks, vec![1, 2, 2]);
        assert_eq!(s.shape().padding, 2);
        // ω⃗ = (0, 0, 𝒬₁∂₁, 𝒬₂∂₂) and the bidiagonal block
        assert_eq!(s.matrix[0][1..], [UpsEntry::Zero, UpsEntry::Zero, UpsEntry::CoeffDerivative(0), UpsEntry::CoeffDerivative(1)]);
        assert_eq!(s.matrix[3][1], UpsEntry::Derivative(0));
        assert_eq!(s.matrix[3][3], UpsEntry::Identity(-1));
        assert_eq!(s.matrix[1][0], UpsEntry::Derivative(0));
        assert!(matches!(
            ReductionSystem::new(CoefficientSource::Transfer {
                cfg: cfg(2, 1, 3),
                delta: cx(0.0, 0.0)
            }),
            Err(LabError::UnsupportedShape(_))
        ));
        let s = ReductionSystem::new(CoefficientSource::DomainWall { cfg: cfg(4, 0, 4) }).unwrap();
        assert_eq!(s.dim, 4 * 2 + 1);
    }

    #[test]
    fn psi_chain_matches_repeated_derivatives() {
        let f = random_poly(2, 3, 5);
        let psi = build_psi(&f, 4).unwrap();
        assert_eq!(psi.len(), 5);
        assert_eq!(psi[0], f);
        assert_eq!(psi[1], f.partial_derivative(0, 1));
        assert_eq!(psi[2], f.partial_derivative(1, 1));
        assert!(psi[3].max_coeff_diff(&f.partial_derivative(0, 2)) < 1e-14);
        assert!(psi[4].max_coeff_diff(&f.partial_derivative(1, 2)) < 1e-14);
        let psi3 = build_psi(&random_poly(1, 2, 6), 3).unwrap();
        assert_eq!(psi3.len(), 2);
        assert!(build_psi(&f, 2).is_err());
    }

    #[test]
    fn defining_rows_vanish_and_pde_row_is_the_equation() {
        let c = cfg(4, 2, 7);
        let sys = ReductionSystem::new(CoefficientSource::Transfer {
            cfg: c.clone(),
            delta: cx(0.3, -0.1),
        })
        .unwrap();
        let mut rng = LabRng::new(8);
        for seed in 0..5 {
            let f = random_poly(2, 3, 100 + seed);
            let pt = rng.spread_point(2, 1.0, 0.2);
            let r = upsilon_residual(&sys, &build_psi(&f, 4).unwrap(), &pt).unwrap();
            assert!(r.defining_rows() < 1e-12);
            assert!(pde_row_equivalence(&sys, &f, &pt).unwrap() < 1e-12);
        }
    }
}
