//! Random-embedding tree search in the multiple-run style: `M` independent
//! searches, each on the deterministic realization of one fixed projection
//! matrix, splitting the budget evenly.

use super::{
    default_h_max, soo::run_soo, BudgetedFn, Incumbent, OptimizerConfig, OptimizerError,
    RunResult, STREAM_RESOO_BASE,
};
use crate::embedding::{project, sample_matrix, MatrixSource};
use crate::functions::Objective;
use crate::spaces::{make_low_space, LowPoint, RngStream};

pub fn resoo(f: &Objective, cfg: &OptimizerConfig) -> Result<RunResult, OptimizerError> {
    cfg.validate()?;
    if cfg.budget < cfg.m {
        return Err(OptimizerError::BudgetBelowEmbeddings {
            budget: cfg.budget,
            m: cfg.m,
        });
    }
    let space = make_low_space(cfg.d, cfg.eta)?;
    let base_share = cfg.budget / cfg.m;
    let remainder = cfg.budget % cfg.m;
    let h_max = default_h_max(base_share);

    let mut best = f64::INFINITY;
    let mut curve: Vec<(u64, f64)> = Vec::new();
    let mut incumbent: Option<Incumbent> = None;
    let mut evals: u64 = 0;
    let mut iterations: u64 = 0;
    for s in 0..cfg.m {
        let share = base_share + u64::from(s < remainder);
        let mut matrices =
            MatrixSource::new(RngStream::new(cfg.seed, STREAM_RESOO_BASE + s));
        let a = sample_matrix(f.n(), cfg.d, &mut matrices);
        let mut source = BudgetedFn::new(
            |y: &[f64]| f.evaluate(&project(&a, &LowPoint(y.to_vec())).expect("dims fixed")),
            share,
        );
        let run = run_soo(&mut source, &space, cfg.k, h_max, None)?;
        for &(e, v) in &run.curve {
            if v < best {
                best = v;
                curve.push((evals + e, v));
            }
        }
        if let Some(inc) = run.incumbent {
            if run.best_value <= best {
                incumbent = Some(Incumbent {
                    low: inc.low,
                    matrix: Some(a.origin()),
                    high: None,
                });
            }
        }
        evals += run.evaluations_used;
        iterations += run.iterations;
    }

    Ok(RunResult {
        best_value: best,
        curve,
        evaluations_used: evals,
        iterations,
        incumbent,
        stopped_early: evals < cfg.budget,
    })
}
