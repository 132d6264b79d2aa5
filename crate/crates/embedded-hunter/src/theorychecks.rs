//! Monte-Carlo checks of the analytical guarantees behind the random
//! embedding: the mean-absolute-difference bound for two independent
//! projections of the same low point, the expected operator norm of a matrix
//! difference, and local distance preservation in the
//! Johnson-Lindenstrauss sense.
//!
//! Each check returns an empirical mean next to its closed-form bound with a
//! one-sided three-standard-error margin: `pass` means the data is consistent
//! with the bound, not a proof of it.

use crate::embedding::{project_fresh, regenerate_matrix, MatrixSource, MatrixTag};
use crate::functions::Objective;
use crate::spaces::{l2_norm_slice, LowPoint, RngStream};
use rayon::prelude::*;
use thiserror::Error;

pub const STREAM_THEOREM1: u64 = 0xB1;
pub const STREAM_MATRIX_NORM: u64 = 0xB2;
pub const STREAM_JL: u64 = 0xB3;

/// Iteration cap for the power method; with tolerance 1e-6 on the Rayleigh
/// quotient this is far more than random matrices need.
const POWER_ITER_CAP: usize = 10_000;
const POWER_ITER_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error(
        "power iteration did not converge within {cap} iterations (trial {trial}); \
         the two leading singular values may coincide"
    )]
    PowerIterationStalled { cap: usize, trial: u64 },
}

/// An empirical mean next to the bound it must not exceed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub empirical_mean: f64,
    pub bound: f64,
    pub trials: u64,
    pub std_error: f64,
    /// True when `empirical_mean - 3 * std_error <= bound`.
    pub pass: bool,
}

impl BoundReport {
    fn from_samples(samples: &[f64], bound: f64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let std_error = (var / n).sqrt();
        Self {
            empirical_mean: mean,
            bound,
            trials: samples.len() as u64,
            std_error,
            pass: mean - 3.0 * std_error <= bound,
        }
    }
}

/// Check `E[|g_p(y) - g_q(y)|] <= sqrt(8) * L * |y|` over independent matrix
/// pairs, where `g_p(y) = f(clip(A_p y))`.
///
/// `lipschitz` should come from the objective's analytic constant when one is
/// known, else from [`crate::functions::estimate_lipschitz`]; the estimate
/// lower-bounds the true constant, so a pass with it is conservative evidence.
pub fn theorem1_check(
    f: &Objective,
    lipschitz: f64,
    y: &LowPoint,
    trials: u64,
    seed: u64,
) -> BoundReport {
    let mut source = MatrixSource::new(RngStream::new(seed, STREAM_THEOREM1));
    let tags: Vec<(MatrixTag, MatrixTag)> = (0..trials)
        .map(|_| (source.next_tag(), source.next_tag()))
        .collect();
    let samples: Vec<f64> = tags
        .par_iter()
        .map(|&(p, q)| {
            let gp = f.evaluate(&project_fresh(f.n(), p, y.coords()));
            let gq = f.evaluate(&project_fresh(f.n(), q, y.coords()));
            (gp - gq).abs()
        })
        .collect();
    let bound = 8f64.sqrt() * lipschitz * l2_norm_slice(y.coords());
    BoundReport::from_samples(&samples, bound)
}

/// Largest singular value of the row-major `n x d` matrix `m`, by power
/// iteration on `MᵀM`.
fn spectral_norm(m: &[f64], d: usize, trial: u64) -> Result<f64, TheoryError> {
    // gram = MᵀM, d x d
    let mut gram = vec![0.0; d * d];
    for row in m.chunks(d) {
        for i in 0..d {
            for j in 0..d {
                gram[i * d + j] += row[i] * row[j];
            }
        }
    }
    if d == 1 {
        return Ok(gram[0].sqrt());
    }
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITER_CAP {
        let mut w = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                w[i] += gram[i * d + j] * v[j];
            }
        }
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = l2_norm_slice(&w);
        if norm == 0.0 {
            return Ok(0.0);
        }
        for (wi, vi) in w.iter().zip(v.iter_mut()) {
            *vi = wi / norm;
        }
        if (next - lambda).abs() <= POWER_ITER_TOL * next.max(1.0) {
            return Ok(next.sqrt());
        }
        lambda = next;
    }
    Err(TheoryError::PowerIterationStalled {
        cap: POWER_ITER_CAP,
        trial,
    })
}

/// Check `E[|A_p - A_q|] <= sqrt(8/n) * sqrt(max(n, d))` with the operator
/// (spectral) norm, over independent matrix pairs with `N(0, 1/n)` entries.
pub fn matrix_norm_check(
    n: usize,
    d: usize,
    trials: u64,
    seed: u64,
) -> Result<BoundReport, TheoryError> {
    let mut source = MatrixSource::new(RngStream::new(seed, STREAM_MATRIX_NORM));
    let tags: Vec<(MatrixTag, MatrixTag)> = (0..trials)
        .map(|_| (source.next_tag(), source.next_tag()))
        .collect();
    let samples: Vec<f64> = tags
        .par_iter()
        .enumerate()
        .map(|(t, &(p, q))| {
            let ap = regenerate_matrix(n, d, p);
            let aq = regenerate_matrix(n, d, q);
            let diff: Vec<f64> = ap
                .entries()
                .iter()
                .zip(aq.entries())
                .map(|(a, b)| a - b)
                .collect();
            spectral_norm(&diff, d, t as u64)
        })
        .collect::<Result<_, _>>()?;
    let bound = (8.0 / n as f64).sqrt() * (n.max(d) as f64).sqrt();
    Ok(BoundReport::from_samples(&samples, bound))
}

/// Outcome of the local-distance-preservation check.
#[derive(Debug, Clone, PartialEq)]
pub struct JlReport {
    /// Fraction of trials in which every pair satisfied
    /// `|A y_i - A y_j| <= sqrt(1 + eps) * |y_i - y_j|` (unclipped products).
    pub success_fraction: f64,
    pub trials: u64,
    /// Smallest real `n` for which the dimension condition
    /// `n > 9 ln m / (eps^2 - eps^3)` holds.
    pub min_n: f64,
    /// Whether the supplied `n` meets that condition; callers should warn
    /// when it does not.
    pub n_meets_condition: bool,
}

/// Estimate how often one random projection contracts-or-mildly-expands all
/// pairwise distances among `points`, in the unclipped image.
pub fn jl_check(points: &[LowPoint], n: usize, eps: f64, trials: u64, seed: u64) -> JlReport {
    assert!(eps > 0.0 && eps <= 0.5, "eps must lie in (0, 1/2]");
    let m = points.len();
    let min_n = if m >= 2 {
        9.0 * (m as f64).ln() / (eps * eps - eps * eps * eps)
    } else {
        0.0
    };
    let d = points.first().map_or(0, LowPoint::dim);
    let bound_factor = (1.0 + eps).sqrt();
    let mut source = MatrixSource::new(RngStream::new(seed, STREAM_JL));
    let tags: Vec<MatrixTag> = (0..trials).map(|_| source.next_tag()).collect();
    let successes: u64 = tags
        .par_iter()
        .map(|&tag| {
            let a = regenerate_matrix(n, d, tag);
            let images: Vec<Vec<f64>> = points
                .iter()
                .map(|y| {
                    a.entries()
                        .chunks(d)
                        .map(|row| row.iter().zip(y.coords()).map(|(e, c)| e * c).sum())
                        .collect()
                })
                .collect();
            let ok = (0..m).all(|i| {
                (i + 1..m).all(|j| {
                    let dist_low = dist(points[i].coords(), points[j].coords());
                    let dist_high = dist(&images[i], &images[j]);
                    dist_high <= bound_factor * dist_low
                })
            });
            u64::from(ok)
        })
        .sum();
    JlReport {
        success_fraction: successes as f64 / trials as f64,
        trials,
        min_n,
        n_meets_condition: (n as f64) > min_n,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
