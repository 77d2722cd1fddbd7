//! Seeded random draws used by the checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{cabs, csinh, cx, Cx, Real};

/// Seeded generator for complex parameters.
///
/// Draws have real part in [-1, 1] and imaginary part in [-0.5, 0.5].
pub struct LabRng {
    inner: ChaCha8Rng,
}

impl LabRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn complex<T: Real>(&mut self) -> Cx<T> {
        let re = self.inner.gen_range(-1.0..=1.0);
        let im = self.inner.gen_range(-0.5..=0.5);
        cx(re, im)
    }

    pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.gen_range(lo..hi)
    }

    /// `count` draws whose pairwise sinh-differences stay above `min_gap`.
    pub fn distinct<T: Real>(&mut self, count: usize, min_gap: f64) -> Vec<Cx<T>> {
        let mut out: Vec<Cx<T>> = Vec::with_capacity(count);
        while out.len() < count {
            let z = self.complex::<T>();
            if out
                .iter()
                .all(|w| cabs(csinh(z - *w)).as_f64() > min_gap)
            {
                out.push(z);
            }
        }
        out
    }

    /// Anisotropy draw with |sinh γ| above `min_c`.
    pub fn anisotropy<T: Real>(&mut self, min_c: f64) -> Cx<T> {
        loop {
            let g = self.complex::<T>();
            if cabs(csinh(g)).as_f64() > min_c {
                return g;
            }
        }
    }

    /// Point with every coordinate in the box and pairwise gaps above `min_gap`.
    pub fn spread_point<T: Real>(&mut self, n: usize, radius: f64, min_gap: f64) -> Vec<Cx<T>> {
        let mut out: Vec<Cx<T>> = Vec::with_capacity(n);
        while out.len() < n {
            let z = cx::<T>(
                self.inner.gen_range(-radius..=radius),
                self.inner.gen_range(-radius..=radius),
            );
            if cabs(z).as_f64() > 0.05 && out.iter().all(|w| cabs(z - *w).as_f64() > min_gap) {
                out.push(z);
            }
        }
        out
    }
}
