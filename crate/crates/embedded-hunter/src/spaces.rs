//! Box domains, low/high-dimensional points, and deterministic RNG streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("eta must lie in (0, 1), got {0}")]
    EtaOutOfRange(f64),
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("lower bound must be strictly below upper bound at coordinate {0}")]
    EmptyInterval(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
}

/// An axis-aligned box `[lower_i, upper_i]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SpaceError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(SpaceError::ZeroDim);
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(SpaceError::EmptyInterval(i));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The symmetric box `[-b, b]^dim`.
    pub fn symmetric(dim: usize, bound: f64) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDim);
        }
        if !(bound > 0.0) {
            return Err(SpaceError::EmptyInterval(0));
        }
        Ok(Self {
            lower: vec![-bound; dim],
            upper: vec![bound; dim],
        })
    }

    /// The high-dimensional decision space `[-1, 1]^n`.
    pub fn unit(n: usize) -> Result<Self, SpaceError> {
        Self::symmetric(n, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim()
            && coords
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// The low-dimensional search space `[-d/eta, d/eta]^d`.
pub fn make_low_space(d: usize, eta: f64) -> Result<BoxSpace, SpaceError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(SpaceError::EtaOutOfRange(eta));
    }
    BoxSpace::symmetric(d, d as f64 / eta)
}

/// A point in the low-dimensional search space.
#[derive(Debug, Clone, PartialEq)]
pub struct LowPoint(pub Vec<f64>);

impl LowPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// A point in the high-dimensional decision space; every coordinate in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HighPoint(pub Vec<f64>);

impl HighPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Euclidean norm of a coordinate slice.
pub fn l2_norm_slice(coords: &[f64]) -> f64 {
    coords.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Euclidean norm of a low-dimensional point.
pub fn l2_norm(p: &LowPoint) -> f64 {
    l2_norm_slice(&p.0)
}

/// A named, replayable stream of randomness.
///
/// Streams are ChaCha8 counter-mode generators: equal `(seed, id)` pairs
/// produce identical draws on every platform and every run. Each `(run,
/// purpose)` pair in the project gets its own stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub id: u64,
}

impl RngStream {
    pub fn new(seed: u64, id: u64) -> Self {
        Self { seed, id }
    }

    /// Instantiate the generator at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.id);
        rng
    }

    /// A child stream for an indexed sub-task (e.g. one Monte-Carlo trial).
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(self.id)),
            id: splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)),
        }
    }
}

/// SplitMix64 finalizer; a stable mixing function for deriving seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
