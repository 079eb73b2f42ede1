//! Low-discrepancy sampling of spacetime boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BASES: [u64; 4] = [2, 3, 5, 7];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    r
}

/// Axis-aligned box in `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl SampleBox {
    pub fn new(lo: [f64; 4], hi: [f64; 4]) -> Result<Self> {
        for a in 0..4 {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(Error::Config(format!(
                    "box axis {a}: need finite lo < hi, got {} .. {}",
                    lo[a], hi[a]
                )));
            }
        }
        Ok(SampleBox { lo, hi })
    }

    /// The same interval `[a, b]` on every axis.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new([a; 4], [b; 4])
    }

    pub fn map_unit(&self, u: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|k| self.lo[k] + (self.hi[k] - self.lo[k]) * u[k])
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            lo: [-2.0; 4],
            hi: [2.0; 4],
        }
    }
}

/// Halton sequence in bases 2, 3, 5, 7 with a Cranley-Patterson rotation
/// drawn from the seed. Index `i` always maps to the same point.
#[derive(Clone, Debug)]
pub struct Halton4 {
    shift: [f64; 4],
}

impl Halton4 {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton4 {
            shift: std::array::from_fn(|_| rng.gen::<f64>()),
        }
    }

    pub fn unit(&self, index: u64) -> [f64; 4] {
        std::array::from_fn(|k| (radical_inverse(index + 1, BASES[k]) + self.shift[k]).fract())
    }

    pub fn point(&self, index: u64, b: &SampleBox) -> [f64; 4] {
        b.map_unit(self.unit(index))
    }
}
