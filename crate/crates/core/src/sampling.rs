//! Seeded random rational points for identity testing.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Point, Var};
use crate::systems::ParameterVector;

/// Numerator and denominator magnitudes are bounded by this value.
pub const SAMPLE_BOUND: i64 = 1000;

/// Default number of random points per check.
pub const DEFAULT_SAMPLES: usize = 8;

/// Resampling budget when a point hits a vanishing denominator.
pub const MAX_RESAMPLES: usize = 64;

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// FNV-1a; stable across runs and platforms, unlike the std hasher.
fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Sampler {
    /// Each check gets its own stream so that concurrent checks stay
    /// deterministic regardless of scheduling.
    pub fn new(seed: u64, check: &str) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed ^ stable_hash(check)),
        }
    }

    pub fn rational(&mut self) -> BigRational {
        let n = self.rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
        let d = self.rng.gen_range(1..=SAMPLE_BOUND);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Random values for `vars` plus parameters on the constraint hyperplane.
    pub fn point(&mut self, vars: &[Var], params: &ParameterVector) -> Point {
        let mut pt = Point::new();
        for &v in vars {
            pt.set(v, self.rational());
        }
        self.fill_params(&mut pt, params);
        pt
    }

    pub fn fill_params(&mut self, pt: &mut Point, params: &ParameterVector) {
        for &s in params.symbols().iter().skip(1) {
            pt.set(s, self.rational());
        }
        let first = params.symbols()[0];
        match params.solve_first(pt) {
            Some(value) => pt.set(first, value),
            None => pt.set(first, self.rational()),
        }
    }
}
