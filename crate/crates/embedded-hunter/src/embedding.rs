//! Gaussian random matrices, the clipping projection into `[-1,1]^n`, and
//! the stochastic low-dimensional objective they induce.
//!
//! A projection matrix has i.i.d. `N(0, 1/n)` entries. Matrices are sampled,
//! used for a single evaluation, and discarded; only a provenance tag is
//! kept, from which the matrix can be regenerated bit-exactly. The
//! matrix-vector product is computed row by row while the entries are being
//! generated, so the matrix itself is never materialized on the hot path.

use crate::functions::Objective;
use crate::spaces::{splitmix64, BoxSpace, HighPoint, LowPoint, RngStream, SpaceError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("dimension mismatch: matrix has {cols} columns, point has {dim} coordinates")]
    DimMismatch { cols: usize, dim: usize },
    #[error("evaluation budget exhausted ({budget} evaluations)")]
    BudgetExhausted { budget: u64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Provenance of one sampled projection matrix: `(seed, stream id, draw index)`.
///
/// The tag is sufficient to regenerate the matrix exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixTag {
    pub seed: u64,
    pub stream: u64,
    pub draw: u64,
}

impl MatrixTag {
    /// The generator that produced (and reproduces) this matrix's entries.
    fn rng(&self) -> ChaCha8Rng {
        let s = splitmix64(self.seed ^ splitmix64(self.stream ^ splitmix64(self.draw)));
        ChaCha8Rng::seed_from_u64(s)
    }
}

/// A counted source of projection matrices on one stream.
#[derive(Debug, Clone)]
pub struct MatrixSource {
    stream: RngStream,
    next_draw: u64,
}

impl MatrixSource {
    pub fn new(stream: RngStream) -> Self {
        Self {
            stream,
            next_draw: 0,
        }
    }

    pub fn next_tag(&mut self) -> MatrixTag {
        let tag = MatrixTag {
            seed: self.stream.seed,
            stream: self.stream.id,
            draw: self.next_draw,
        };
        self.next_draw += 1;
        tag
    }

    pub fn draws(&self) -> u64 {
        self.next_draw
    }
}

/// An explicit `n x d` Gaussian matrix with `N(0, 1/n)` entries, row-major.
///
/// Materialized matrices are for small problems and for the theory checks;
/// the optimizers use [`project_fresh`] instead.
#[derive(Debug, Clone)]
pub struct GaussianMatrix {
    n: usize,
    d: usize,
    entries: Vec<f64>,
    origin: MatrixTag,
}

impl GaussianMatrix {
    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn origin(&self) -> MatrixTag {
        self.origin
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    /// A matrix with given entries; for tests and hand-built cases.
    pub fn from_entries(n: usize, d: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * d);
        Self {
            n,
            d,
            entries,
            origin: MatrixTag {
                seed: 0,
                stream: 0,
                draw: 0,
            },
        }
    }
}

/// Sample an `n x d` matrix with i.i.d. `N(0, 1/n)` entries from the source.
pub fn sample_matrix(n: usize, d: usize, source: &mut MatrixSource) -> GaussianMatrix {
    let tag = source.next_tag();
    GaussianMatrix {
        n,
        d,
        entries: regenerate_entries(n, d, tag),
        origin: tag,
    }
}

/// Regenerate a matrix bit-exactly from its provenance tag.
pub fn regenerate_matrix(n: usize, d: usize, tag: MatrixTag) -> GaussianMatrix {
    GaussianMatrix {
        n,
        d,
        entries: regenerate_entries(n, d, tag),
        origin: tag,
    }
}

fn regenerate_entries(n: usize, d: usize, tag: MatrixTag) -> Vec<f64> {
    let mut rng = tag.rng();
    let sigma = 1.0 / (n as f64).sqrt();
    (0..n * d)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn clip(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Euclidean projection `P_X(Ay)`: each coordinate of `Ay` clipped into `[-1, 1]`.
pub fn project(a: &GaussianMatrix, y: &LowPoint) -> Result<HighPoint, EmbeddingError> {
    if y.dim() != a.d {
        return Err(EmbeddingError::DimMismatch {
            cols: a.d,
            dim: y.dim(),
        });
    }
    let coords = (0..a.n)
        .map(|i| {
            let row = &a.entries[i * a.d..(i + 1) * a.d];
            clip(row.iter().zip(y.coords()).map(|(e, c)| e * c).sum())
        })
        .collect();
    Ok(HighPoint(coords))
}

/// Row-streamed `P_X(Ay)` for the matrix identified by `tag`, without ever
/// materializing the matrix.
pub fn project_fresh(n: usize, tag: MatrixTag, y: &[f64]) -> HighPoint {
    let mut rng = tag.rng();
    let sigma = 1.0 / (n as f64).sqrt();
    let coords = (0..n)
        .map(|_| {
            let dot: f64 = y
                .iter()
                .map(|c| sigma * rng.sample::<f64, _>(StandardNormal) * c)
                .sum();
            clip(dot)
        })
        .collect();
    HighPoint(coords)
}

/// One evaluation of the stochastic objective: replaying `matrix` on `point`
/// reproduces `value` bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub value: f64,
    pub matrix: MatrixTag,
    pub point: LowPoint,
}

/// The random function `g_P(y) = f(P_X(Ay))` with a budgeted evaluation counter.
///
/// Every evaluation samples a fresh matrix from the stream, projects, and
/// calls the target exactly once.
pub struct StochasticObjective<'a> {
    target: &'a Objective,
    low_space: BoxSpace,
    source: MatrixSource,
    used: u64,
    budget: u64,
}

impl<'a> StochasticObjective<'a> {
    pub fn new(
        target: &'a Objective,
        low_space: BoxSpace,
        stream: RngStream,
        budget: u64,
    ) -> Self {
        Self {
            target,
            low_space,
            source: MatrixSource::new(stream),
            used: 0,
            budget,
        }
    }

    pub fn low_space(&self) -> &BoxSpace {
        &self.low_space
    }

    pub fn target(&self) -> &Objective {
        self.target
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// Evaluate `g_P` at `y` with a fresh projection matrix.
    pub fn evaluate(&mut self, y: &LowPoint) -> Result<EvaluationRecord, EmbeddingError> {
        if self.exhausted() {
            return Err(EmbeddingError::BudgetExhausted {
                budget: self.budget,
            });
        }
        let tag = self.source.next_tag();
        let x = project_fresh(self.target.n(), tag, y.coords());
        let value = self.target.evaluate(&x);
        self.used += 1;
        Ok(EvaluationRecord {
            value,
            matrix: tag,
            point: y.clone(),
        })
    }

    /// Reconstruct the high-dimensional point of a past evaluation.
    pub fn replay(&self, record: &EvaluationRecord) -> HighPoint {
        project_fresh(self.target.n(), record.matrix, record.point.coords())
    }
}
