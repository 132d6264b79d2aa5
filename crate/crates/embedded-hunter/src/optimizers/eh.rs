//! The embedded hierarchical-bandit tree search.
//!
//! One partition tree over the low space, swept depth-wise and norm-wise.
//! Each sweep resets a threshold `nu_min` to infinity; at each depth, for
//! each norm group from the largest norm down, the group's best leaf is
//! expanded only if its value strictly beats `nu_min`. Children are
//! evaluated with a fresh random projection while their base point's ledger
//! count stays within `M * |y|`; past the cap they inherit the best value
//! already achieved at that base point.

use super::{
    BestTracker, Incumbent, LowEval, OptimizerConfig, OptimizerError, RunResult, TraceAction,
    TraceEvent, TraceSink, STREAM_OPTIMIZER,
};
use crate::embedding::StochasticObjective;
use crate::functions::Objective;
use crate::partition::{make_root, PartitionTree};
use crate::spaces::{make_low_space, BoxSpace, RngStream};

/// Run the full algorithm on a high-dimensional objective.
pub fn embedded_hunter(f: &Objective, cfg: &OptimizerConfig) -> Result<RunResult, OptimizerError> {
    embedded_hunter_traced(f, cfg, None)
}

/// As [`embedded_hunter`], returning the final partition tree and its
/// ledger for inspection.
pub fn embedded_hunter_with_tree(
    f: &Objective,
    cfg: &OptimizerConfig,
) -> Result<(RunResult, PartitionTree), OptimizerError> {
    cfg.validate()?;
    let space = make_low_space(cfg.d, cfg.eta)?;
    let stream = RngStream::new(cfg.seed, STREAM_OPTIMIZER);
    let mut source = StochasticObjective::new(f, space.clone(), stream, cfg.budget);
    run_embedded_hunter(&mut source, &space, cfg.k, cfg.h_max, cfg.m, None)
}

/// As [`embedded_hunter`], with a trace hook receiving every step.
pub fn embedded_hunter_traced(
    f: &Objective,
    cfg: &OptimizerConfig,
    trace: Option<TraceSink>,
) -> Result<RunResult, OptimizerError> {
    cfg.validate()?;
    let space = make_low_space(cfg.d, cfg.eta)?;
    let stream = RngStream::new(cfg.seed, STREAM_OPTIMIZER);
    let mut source = StochasticObjective::new(f, space.clone(), stream, cfg.budget);
    run_embedded_hunter(&mut source, &space, cfg.k, cfg.h_max, cfg.m, trace).map(|(r, _)| r)
}

fn node_index_u128(tree: &PartitionTree, id: usize) -> u128 {
    u128::try_from(&tree.node(id).index).unwrap_or(u128::MAX)
}

/// The core loop over any budgeted low-dimensional evaluation source.
///
/// This is also the seam for the identity-projection test hook: pass a
/// deterministic [`super::BudgetedFn`] to obtain a fully reproducible trace.
pub fn run_embedded_hunter(
    source: &mut dyn LowEval,
    space: &BoxSpace,
    k: usize,
    h_max: usize,
    m: u64,
    mut trace: Option<TraceSink>,
) -> Result<(RunResult, PartitionTree), OptimizerError> {
    if source.budget() < 1 {
        return Err(OptimizerError::EmptyBudget);
    }
    let mut tree = make_root(space, k)?;
    let mut tracker = BestTracker::new();
    let mut iterations: u64 = 0;
    let mut emit = |t: u64, depth: usize, index: u128, action: TraceAction| {
        if let Some(sink) = trace.as_mut() {
            sink(TraceEvent {
                t,
                depth,
                index,
                action,
            });
        }
    };

    // Initialization: evaluate the root base point once. This is the only
    // evaluation exempt from the norm cap (the zero vector has norm 0).
    let root = tree.root();
    let y0 = tree.low_point(root);
    let (v0, tag0) = source
        .evaluate(&y0)
        .expect("budget >= 1 admits the initial evaluation");
    let root_key = tree.node(root).base.clone();
    tree.ledger.record(&root_key, v0, tag0);
    tree.set_best(root, v0);
    tracker.observe(source.used(), v0);
    tracker.incumbent = Some(Incumbent {
        low: y0.0,
        matrix: tag0,
        high: None,
    });
    emit(1, 0, 0, TraceAction::Init);

    let mut stopped_early = false;
    'outer: while !source.exhausted() {
        let mut nu_min = f64::INFINITY;
        let used_at_sweep_start = source.used();
        let mut l = 0usize;
        // the depth bound is re-read each step: expansions within the sweep
        // deepen the tree and the sweep follows them down
        while l <= tree.depth().min(h_max) {
            for group in tree.norm_groups(l) {
                let selected = tree.select_in_group(&group);
                let t_now = iterations + 1;
                emit(
                    t_now,
                    l,
                    node_index_u128(&tree, selected),
                    TraceAction::Select,
                );
                let f_sel = tree.node(selected).best_value();
                if !(f_sel < nu_min) {
                    continue;
                }
                nu_min = f_sel;
                if l >= h_max {
                    // nodes at h_max stay leaves; only the threshold moves
                    continue;
                }
                emit(
                    t_now,
                    l,
                    node_index_u128(&tree, selected),
                    TraceAction::Expand,
                );
                let parent_best = f_sel;
                let children = tree.expand(selected)?;
                for child in children {
                    let key = tree.node(child).base.clone();
                    let count = tree.ledger.count(&key);
                    let cap = m as f64 * tree.node(child).norm;
                    if count as f64 <= cap {
                        let y = tree.low_point(child);
                        match source.evaluate(&y) {
                            Some((value, tag)) => {
                                tree.ledger.record(&key, value, tag);
                                let best_here = tree.ledger.best(&key).unwrap();
                                tree.set_best(child, best_here);
                                if tracker.observe(source.used(), value) {
                                    tracker.incumbent = Some(Incumbent {
                                        low: y.0,
                                        matrix: tag,
                                        high: None,
                                    });
                                }
                                emit(
                                    t_now,
                                    l + 1,
                                    node_index_u128(&tree, child),
                                    TraceAction::EvalChild,
                                );
                            }
                            None => {
                                // budget died mid-children: the rest inherit
                                tree.set_best(child, parent_best);
                                break 'outer;
                            }
                        }
                    } else {
                        let inherited = tree.ledger.best(&key).unwrap_or(parent_best);
                        tree.set_best(child, inherited);
                        emit(
                            t_now,
                            l + 1,
                            node_index_u128(&tree, child),
                            TraceAction::InheritChild,
                        );
                    }
                }
            }
            iterations += 1;
            l += 1;
        }
        if source.used() == used_at_sweep_start {
            // a full sweep without a single evaluation cannot progress
            stopped_early = true;
            break;
        }
    }

    Ok((
        RunResult {
            best_value: tracker.best,
            curve: tracker.curve,
            evaluations_used: source.used(),
            iterations,
            incumbent: tracker.incumbent,
            stopped_early,
        },
        tree,
    ))
}
