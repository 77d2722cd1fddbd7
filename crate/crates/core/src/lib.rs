//! Inhomogeneous six-vertex model: dense Yang–Baxter checks, functional
//! relations for transfer-matrix eigenvalues, the derived family of
//! commuting operators on symmetric polynomials, their closed-form
//! differential representation, the first-order reduction and the
//! domain-wall partition function.
//!
//! Everything is generic over the real scalar (`f32`/`f64`); the aliases
//! below fix it to `f64`.

pub mod config;
pub mod dense;
pub mod dwbc;
pub mod error;
pub mod functional;
pub mod linalg;
pub mod omega;
pub mod pde;
pub mod poly;
pub mod reduction;
pub mod rng;
pub mod scalar;
pub mod yb;

pub use error::{LabError, Result};
pub use scalar::{Cx, Real};

pub type Complex64 = Cx<f64>;
pub type Config = config::SpectralConfig<f64>;
pub type Poly = poly::MultiPoly<f64>;
pub type Operator = poly::PolyOperator<f64>;
pub type Family = omega::OmegaFamily<f64>;
pub type Reduction = reduction::ReductionSystem<f64>;
pub type Sampler = functional::FnSampler<f64>;

pub type Config32 = config::SpectralConfig<f32>;
pub type Poly32 = poly::MultiPoly<f32>;
