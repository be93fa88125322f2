//! Seeded random sampling of exact and approximate test points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{ExactScalar, Scalar};

/// Numerators and denominators of sampled rationals stay within this bound.
pub const RATIONAL_BOUND: i64 = 1000;

pub struct Sampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn ratio(&mut self) -> (i64, i64) {
        let num = self.rng.random_range(-RATIONAL_BOUND..=RATIONAL_BOUND);
        let den = self.rng.random_range(1..=RATIONAL_BOUND);
        (num, den)
    }

    pub fn exact(&mut self) -> ExactScalar {
        let re = self.ratio();
        let im = self.ratio();
        ExactScalar::from_parts(re, im)
    }

    pub fn exact_real(&mut self) -> ExactScalar {
        let re = self.ratio();
        ExactScalar::from_ratio(re.0, re.1)
    }

    /// Nonzero exact sample.
    pub fn exact_nonzero(&mut self) -> ExactScalar {
        loop {
            let z = self.exact();
            if z != ExactScalar::from_i64(0) {
                return z;
            }
        }
    }

    /// `n` pairwise distinct exact samples.
    pub fn exact_distinct(&mut self, n: usize) -> Vec<ExactScalar> {
        let mut out: Vec<ExactScalar> = Vec::with_capacity(n);
        while out.len() < n {
            let z = self.exact();
            if !out.contains(&z) {
                out.push(z);
            }
        }
        out
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform point of the box `[re.0, re.1] x [im.0, im.1]`.
    pub fn complex_in(&mut self, re: (f64, f64), im: (f64, f64)) -> Complex64 {
        Complex64::new(self.uniform(re.0, re.1), self.uniform(im.0, im.1))
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}
