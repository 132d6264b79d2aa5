//! Sequential variant of the multiple-embedding tree search: each of the `M`
//! searches optimizes over `[-1, 1]^(d+1)`, blending the previous incumbent
//! `x_s` with a fresh embedded direction:
//!
//! `h_s(alpha, y) = f(clip(alpha * x_s + A_s (beta * y)))`, `beta = d / eta`.
//!
//! The first search starts from the origin; each later one starts from the
//! clipped best point of the search before it.

use super::{
    default_h_max, soo::run_soo, BudgetedFn, Incumbent, OptimizerConfig, OptimizerError,
    RunResult, STREAM_SRESOO_BASE,
};
use crate::embedding::{sample_matrix, GaussianMatrix, MatrixSource};
use crate::functions::Objective;
use crate::spaces::{BoxSpace, RngStream};

fn blend(alpha: f64, x: &[f64], a: &GaussianMatrix, beta: f64, y: &[f64]) -> Vec<f64> {
    let scaled: Vec<f64> = y.iter().map(|v| beta * v).collect();
    a.entries()
        .chunks(y.len())
        .zip(x.iter())
        .map(|(row, &xi)| {
            let ay: f64 = row.iter().zip(&scaled).map(|(&r, &s)| r * s).sum();
            (alpha * xi + ay).clamp(-1.0, 1.0)
        })
        .collect()
}

pub fn sresoo(f: &Objective, cfg: &OptimizerConfig) -> Result<RunResult, OptimizerError> {
    cfg.validate()?;
    if cfg.budget < cfg.m {
        return Err(OptimizerError::BudgetBelowEmbeddings {
            budget: cfg.budget,
            m: cfg.m,
        });
    }
    let n = f.n();
    let beta = cfg.d as f64 / cfg.eta;
    let space = BoxSpace::unit(cfg.d + 1)?;
    let base_share = cfg.budget / cfg.m;
    let remainder = cfg.budget % cfg.m;
    let h_max = default_h_max(base_share);

    let mut x_s = vec![0.0; n];
    let mut best = f64::INFINITY;
    let mut best_high: Option<Vec<f64>> = None;
    let mut curve: Vec<(u64, f64)> = Vec::new();
    let mut evals: u64 = 0;
    let mut iterations: u64 = 0;
    for s in 0..cfg.m {
        let share = base_share + u64::from(s < remainder);
        let mut matrices =
            MatrixSource::new(RngStream::new(cfg.seed, STREAM_SRESOO_BASE + s));
        let a = sample_matrix(n, cfg.d, &mut matrices);

        // best point of this search, tracked alongside the value so the next
        // search can restart from it
        let mut search_best = f64::INFINITY;
        let mut search_point = x_s.clone();
        let mut source = BudgetedFn::new(
            |z: &[f64]| {
                let x = blend(z[0], &x_s, &a, beta, &z[1..]);
                let v = f.evaluate(&crate::spaces::HighPoint(x.clone()));
                if v < search_best {
                    search_best = v;
                    search_point = x;
                }
                v
            },
            share,
        );
        let run = run_soo(&mut source, &space, cfg.k, h_max, None)?;
        drop(source);
        for &(e, v) in &run.curve {
            if v < best {
                best = v;
                curve.push((evals + e, v));
            }
        }
        if search_best <= best {
            best_high = Some(search_point.clone());
        }
        evals += run.evaluations_used;
        iterations += run.iterations;
        x_s = search_point;
    }

    Ok(RunResult {
        best_value: best,
        curve,
        evaluations_used: evals,
        iterations,
        incumbent: best_high.map(|x| Incumbent {
            low: Vec::new(),
            matrix: None,
            high: Some(x),
        }),
        stopped_early: evals < cfg.budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_function, FunctionName};

    #[test]
    fn incumbent_reproduces_best_value() {
        let f = make_function(FunctionName::Rosenbrock, 2, 20, 5).unwrap();
        let cfg = OptimizerConfig::new(120, 2, 9);
        let r = sresoo(&f, &cfg).unwrap();
        let inc = r.incumbent.expect("has incumbent");
        let x = inc.high.expect("holds high point");
        let v = f.evaluate(&crate::spaces::HighPoint(x));
        assert_eq!(v, r.best_value);
    }

    #[test]
    fn curve_nonincreasing_within_budget() {
        let f = make_function(FunctionName::Ackley, 3, 30, 2).unwrap();
        let cfg = OptimizerConfig::new(200, 3, 11);
        let r = sresoo(&f, &cfg).unwrap();
        assert!(r.evaluations_used <= 200);
        assert!(r.curve.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn seeded_determinism() {
        let f = make_function(FunctionName::Ellipsoid, 2, 25, 4).unwrap();
        let cfg = OptimizerConfig::new(90, 2, 13);
        assert_eq!(sresoo(&f, &cfg).unwrap(), sresoo(&f, &cfg).unwrap());
    }

    #[test]
    fn rejects_budget_below_m() {
        let f = make_function(FunctionName::Ellipsoid, 2, 20, 3).unwrap();
        let mut cfg = OptimizerConfig::new(3, 2, 7);
        cfg.m = 5;
        assert!(matches!(
            sresoo(&f, &cfg),
            Err(OptimizerError::BudgetBelowEmbeddings { budget: 3, m: 5 })
        ));
    }
}
