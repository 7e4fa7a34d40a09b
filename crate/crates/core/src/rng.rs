//! Counter-based random streams.
//!
//! A [`RandomStream`] is a ChaCha8 generator keyed by a master seed and
//! positioned on an independent stream selected by an index. The stream for
//! trial `i` is a pure function of `(master_seed, i)`, which makes parallel
//! experiments independent of scheduling.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream index reserved for drawing random experiment centers.
pub const CENTER_STREAM: u64 = u64::MAX;

/// Description of the per-trial stream derivation, echoed into reports.
pub const DERIVATION_TAG: &str = "chacha8(seed_from_u64(master_seed)).set_stream(trial_index)";

#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Stream 0 of the given master seed.
    pub fn new(master_seed: u64) -> Self {
        Self::derive(master_seed, 0)
    }

    /// The independent stream `index` of `master_seed`.
    pub fn derive(master_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform_open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard circular complex Gaussian: `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.standard_normal() * s, self.standard_normal() * s)
    }

    pub fn complex_normal_vec(&mut self, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| self.complex_normal()).collect()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
