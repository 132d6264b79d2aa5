//! Uniform random search directly in the high-dimensional box `[-1, 1]^n`.

use super::{Incumbent, OptimizerConfig, OptimizerError, RunResult, STREAM_OPTIMIZER};
use crate::functions::Objective;
use crate::spaces::{HighPoint, RngStream};
use rand::Rng;

pub fn random_search(f: &Objective, cfg: &OptimizerConfig) -> Result<RunResult, OptimizerError> {
    if cfg.budget < 1 {
        return Err(OptimizerError::EmptyBudget);
    }
    let n = f.n();
    let mut rng = RngStream::new(cfg.seed, STREAM_OPTIMIZER).rng();
    let mut best = f64::INFINITY;
    let mut best_point = vec![0.0; n];
    let mut curve = Vec::new();
    for t in 1..=cfg.budget {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let v = f.evaluate(&HighPoint(x.clone()));
        if v < best {
            best = v;
            best_point = x;
            curve.push((t, v));
        }
    }
    Ok(RunResult {
        best_value: best,
        curve,
        evaluations_used: cfg.budget,
        iterations: cfg.budget,
        incumbent: Some(Incumbent {
            low: Vec::new(),
            matrix: None,
            high: Some(best_point),
        }),
        stopped_early: false,
    })
}
