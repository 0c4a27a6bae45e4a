// SPDX-License-Identifier: MIT OR Apache-2.0

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal, StudentT};

/// Deterministic random stream; equal seeds give equal draw sequences.
#[derive(Clone, Debug)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn seed_from(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// An independent stream seeded from this one.
    pub fn fork(&mut self) -> Self {
        Self::seed_from(self.next_u64())
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform on `(0, 1)`, never exactly zero.
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }

    /// Exponential with the given rate (mean `1 / rate`).
    pub fn exponential(&mut self, rate: f64) -> f64 {
        Exp::new(rate).expect("positive rate").sample(&mut self.0)
    }

    pub fn student_t(&mut self, nu: f64) -> f64 {
        StudentT::new(nu).expect("positive degrees of freedom").sample(&mut self.0)
    }
}

/// Seed of replication `index` under `master`: the splitmix64 finalizer
/// (multiply-xor-shift cascade) applied to `master ^ index`.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
