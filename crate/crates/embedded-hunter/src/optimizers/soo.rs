//! Deterministic simultaneous optimistic tree search over a symmetric box.
//!
//! Same sweep structure as the embedded search but with a single group per
//! depth: the depth's best leaf expands iff its value strictly beats the
//! sweep threshold. The objective is deterministic, so the center child
//! inherits its parent's value instead of re-evaluating the same point;
//! every off-center child is evaluated exactly once at creation. A run thus
//! spends 1 evaluation on the root plus `K - 1` per expansion.

use super::{
    BestTracker, Incumbent, LowEval, OptimizerError, RunResult, TraceAction, TraceEvent,
    TraceSink,
};
use crate::partition::{make_root, NormGroup};
use crate::spaces::BoxSpace;

/// Run the tree search on a deterministic objective over `space`.
pub fn soo<F: FnMut(&[f64]) -> f64>(
    g: F,
    space: &BoxSpace,
    budget: u64,
    k: usize,
    h_max: usize,
) -> Result<RunResult, OptimizerError> {
    let mut source = super::BudgetedFn::new(g, budget);
    run_soo(&mut source, space, k, h_max, None)
}

/// Core loop, generic over the evaluation source and traceable.
pub fn run_soo(
    source: &mut dyn LowEval,
    space: &BoxSpace,
    k: usize,
    h_max: usize,
    mut trace: Option<TraceSink>,
) -> Result<RunResult, OptimizerError> {
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

    let root = tree.root();
    let y0 = tree.low_point(root);
    let (v0, _) = source
        .evaluate(&y0)
        .expect("budget >= 1 admits the initial evaluation");
    let root_key = tree.node(root).base.clone();
    tree.ledger.record(&root_key, v0, None);
    tree.set_best(root, v0);
    tracker.observe(source.used(), v0);
    tracker.incumbent = Some(Incumbent {
        low: y0.0,
        matrix: None,
        high: None,
    });
    emit(1, 0, 0, TraceAction::Init);

    let mut stopped_early = false;
    'outer: while !source.exhausted() {
        let mut nu_min = f64::INFINITY;
        let used_at_sweep_start = source.used();
        let mut l = 0usize;
        while l <= tree.depth().min(h_max) {
            let leaves = tree.leaves_at(l).to_vec();
            if !leaves.is_empty() {
                let group = NormGroup {
                    depth: l,
                    rank: 1,
                    members: leaves,
                };
                let selected = tree.select_in_group(&group);
                let t_now = iterations + 1;
                let sel_index = u128::try_from(&tree.node(selected).index).unwrap_or(u128::MAX);
                emit(t_now, l, sel_index, TraceAction::Select);
                let f_sel = tree.node(selected).best_value();
                if f_sel < nu_min {
                    nu_min = f_sel;
                    if l < h_max {
                        emit(t_now, l, sel_index, TraceAction::Expand);
                        let parent_base = tree.node(selected).base.clone();
                        let children = tree.expand(selected)?;
                        for child in children {
                            let child_index =
                                u128::try_from(&tree.node(child).index).unwrap_or(u128::MAX);
                            if tree.node(child).base == parent_base {
                                // deterministic objective: same point, same value
                                tree.set_best(child, f_sel);
                                emit(t_now, l + 1, child_index, TraceAction::InheritChild);
                                continue;
                            }
                            let y = tree.low_point(child);
                            match source.evaluate(&y) {
                                Some((value, _)) => {
                                    let key = tree.node(child).base.clone();
                                    tree.ledger.record(&key, value, None);
                                    tree.set_best(child, value);
                                    if tracker.observe(source.used(), value) {
                                        tracker.incumbent = Some(Incumbent {
                                            low: y.0,
                                            matrix: None,
                                            high: None,
                                        });
                                    }
                                    emit(t_now, l + 1, child_index, TraceAction::EvalChild);
                                }
                                None => {
                                    tree.set_best(child, f_sel);
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            iterations += 1;
            l += 1;
        }
        if source.used() == used_at_sweep_start {
            stopped_early = true;
            break;
        }
    }

    Ok(RunResult {
        best_value: tracker.best,
        curve: tracker.curve,
        evaluations_used: source.used(),
        iterations,
        incumbent: tracker.incumbent,
        stopped_early,
    })
}
