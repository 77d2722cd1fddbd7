//! The global problem instance shared by every check.

use crate::error::{LabError, Result};
use crate::rng::LabRng;
use crate::scalar::{cabs, cexp, csinh, cx, is_finite, Cx, Real};

/// Default dense capacity cap on the lattice length.
pub const DEFAULT_MAX_L: usize = 12;

/// Lattice length `l`, excitation number `n`, anisotropy `gamma` (q = e^γ),
/// inhomogeneities `mu` (y_j = e^{2μ_j}), residual tolerance and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConfig<T: Real> {
    pub l: usize,
    pub n: usize,
    pub gamma: Cx<T>,
    pub mu: Vec<Cx<T>>,
    pub tol: T,
    pub seed: u64,
    /// Dense-storage cap on `l`.
    pub max_l: usize,
}

impl<T: Real> SpectralConfig<T> {
    pub fn new(l: usize, n: usize, gamma: Cx<T>, mu: Vec<Cx<T>>) -> Result<Self> {
        let cfg = Self {
            l,
            n,
            gamma,
            mu,
            tol: T::lit(1e-9),
            seed: 0,
            max_l: DEFAULT_MAX_L,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Random anisotropy and inhomogeneities drawn from `seed`.
    pub fn random(l: usize, n: usize, seed: u64) -> Result<Self> {
        let mut rng = LabRng::new(seed);
        let gamma = rng.anisotropy::<T>(0.2);
        let mu = rng.distinct::<T>(l, 0.05);
        let mut cfg = Self::new(l, n, gamma, mu)?;
        cfg.seed = seed;
        Ok(cfg)
    }

    /// Same anisotropy and inhomogeneities, different excitation number.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.n = n;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(LabError::InvalidArgument("L must be positive".into()));
        }
        if self.n > self.l {
            return Err(LabError::InvalidArgument(format!(
                "n = {} exceeds L = {}",
                self.n, self.l
            )));
        }
        if self.mu.len() != self.l {
            return Err(LabError::InvalidArgument(format!(
                "mu: expected {} inhomogeneities, got {}",
                self.l,
                self.mu.len()
            )));
        }
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.tol > T::zero()) {
            return Err(LabError::InvalidArgument("tol must be positive".into()));
        }
        if !is_finite(self.gamma) {
            return Err(LabError::InvalidArgument("gamma must be finite".into()));
        }
        if cabs(csinh(self.gamma)) <= self.tol {
            return Err(LabError::InvalidArgument(
                "gamma: sinh(gamma) vanishes, the c-weight is degenerate".into(),
            ));
        }
        for (j, m) in self.mu.iter().enumerate() {
            let y = cexp(*m * T::lit(2.0));
            if !is_finite(*m) || !is_finite(y) || cabs(y) == T::zero() {
                return Err(LabError::InvalidArgument(format!(
                    "mu[{j}] must be finite with finite nonzero e^(2 mu)"
                )));
            }
        }
        self.check_capacity()
    }

    pub fn check_capacity(&self) -> Result<()> {
        if self.l > self.max_l {
            return Err(LabError::Capacity {
                what: "L",
                value: self.l,
                cap: self.max_l,
            });
        }
        Ok(())
    }

    /// q = e^γ.
    pub fn q(&self) -> Cx<T> {
        cexp(self.gamma)
    }

    /// y_j = e^{2μ_j}.
    pub fn y(&self) -> Vec<Cx<T>> {
        self.mu.iter().map(|m| cexp(*m * T::lit(2.0))).collect()
    }

    /// ∏_j y_j^{1/2}, taken as e^{Σμ_j} so no branch choice is involved.
    pub fn sqrt_y_product(&self) -> Cx<T> {
        cexp(self.mu.iter().fold(cx::<T>(0.0, 0.0), |acc, m| acc + *m))
    }

    /// 2^L as a scalar.
    pub fn two_pow_l(&self) -> T {
        T::lit(2f64.powi(self.l as i32))
    }

    pub fn dim(&self) -> usize {
        1usize << self.l
    }
}
