//! The acceptance gate: ten checks covering projection arithmetic, the
//! Monte-Carlo bounds, optimizer bookkeeping, the hand-executed traces,
//! sampling statistics, the qualitative algorithm ordering at desk scale,
//! convergence monotonicity, and byte-level determinism.
//!
//! Each criterion prints one `PASS`/`FAIL` line; the test fails if any
//! criterion does.

use embedded_hunter::bench::{
    run_experiment, write_outcome, AlgorithmName, ExperimentConfig, Family,
};
use embedded_hunter::embedding::{
    project, sample_matrix, GaussianMatrix, MatrixSource,
};
use embedded_hunter::functions::{make_function, FunctionName, Objective};
use embedded_hunter::optimizers::{
    default_h_max, embedded_hunter, embedded_hunter_with_tree, random_search, resoo, run_soo,
    sresoo, BudgetedFn, OptimizerConfig, RunResult, TraceEvent,
};
use embedded_hunter::spaces::{BoxSpace, LowPoint, RngStream};
use embedded_hunter::theorychecks::{matrix_norm_check, theorem1_check};
use rand::Rng;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate {
            failures: Vec::new(),
        }
    }

    fn record(&mut self, number: u32, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => println!("criterion {number:2} ({name}): PASS"),
            Err(why) => {
                println!("criterion {number:2} ({name}): FAIL — {why}");
                self.failures.push(format!("{number} ({name}): {why}"));
            }
        }
    }
}

fn check(cond: bool, why: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why)
    }
}

// 1. The three projection examples, exactly.
fn criterion_projection() -> Result<(), String> {
    let mut src = MatrixSource::new(RngStream::new(1, 0));
    let a = sample_matrix(30, 4, &mut src);
    let zero = project(&a, &LowPoint(vec![0.0; 4])).map_err(|e| e.to_string())?;
    check(zero.coords() == [0.0; 30], "zero vector image not exact".into())?;

    let a = GaussianMatrix::from_entries(2, 1, vec![2.0, 0.5]);
    let x = project(&a, &LowPoint(vec![1.0])).map_err(|e| e.to_string())?;
    check(x.coords() == [1.0, 0.5], format!("clipping case gave {:?}", x.coords()))?;

    let a = GaussianMatrix::from_entries(3, 2, vec![0.125, 0.1875, -0.25, 0.03125, 0.0, 0.25]);
    let x = project(&a, &LowPoint(vec![1.0, 2.0])).map_err(|e| e.to_string())?;
    check(
        x.coords() == [0.5, -0.1875, 0.5],
        format!("inactive-clipping case gave {:?}", x.coords()),
    )
}

// 2. Mean-absolute-difference bound for the linear objective at four norms.
fn criterion_mean_diff_bound() -> Result<(), String> {
    let c = 2.0;
    let f = Objective::linear(c, 50);
    let d = 5;
    for norm in [0.0, 0.5, 1.0, 5.0] {
        let y = LowPoint(vec![norm / (d as f64).sqrt(); d]);
        let r = theorem1_check(&f, c.abs(), &y, 10_000, 101);
        if norm == 0.0 {
            check(
                r.empirical_mean == 0.0,
                format!("zero-norm mean is {}, not exactly 0", r.empirical_mean),
            )?;
        }
        check(
            r.pass,
            format!("norm {norm}: mean {} > bound {} at 3 s.e.", r.empirical_mean, r.bound),
        )?;
    }
    Ok(())
}

// 3. Matrix-difference operator-norm bound; scalar case against 2/sqrt(pi).
fn criterion_matrix_norm_bound() -> Result<(), String> {
    let scalar = matrix_norm_check(1, 1, 100_000, 103).map_err(|e| e.to_string())?;
    let half_normal = 2.0 / std::f64::consts::PI.sqrt();
    let rel = (scalar.empirical_mean - half_normal).abs() / half_normal;
    check(
        rel <= 0.02,
        format!("scalar mean {} is {rel:.4} away from 2/sqrt(pi)", scalar.empirical_mean),
    )?;
    check(scalar.pass, "scalar case failed its bound".into())?;
    for (n, d, trials) in [(10, 10, 1_000), (100, 10, 300), (1_000, 10, 100)] {
        let r = matrix_norm_check(n, d, trials, 103).map_err(|e| e.to_string())?;
        check(
            r.pass,
            format!("(n={n}, d={d}): mean {} > bound {} at 3 s.e.", r.empirical_mean, r.bound),
        )?;
    }
    Ok(())
}

// 4. The zero base point is evaluated exactly once in every run.
fn criterion_zero_vector_once() -> Result<(), String> {
    for seed in 0..50u64 {
        let name = FunctionName::ALL[seed as usize % 4];
        let f = make_function(name, 3, 60, seed).map_err(|e| e.to_string())?;
        let cfg = OptimizerConfig::new(500, 3, seed);
        let (_, tree) = embedded_hunter_with_tree(&f, &cfg).map_err(|e| e.to_string())?;
        let zero_key = tree.node(tree.root()).base.clone();
        let count = tree.ledger.count(&zero_key);
        check(
            count == 1,
            format!("seed {seed} ({name}): zero-point ledger count {count}"),
        )?;
    }
    Ok(())
}

// 5. Budget accounting and curve monotonicity over 100 random configs
//    per optimizer.
fn criterion_budget_exactness() -> Result<(), String> {
    let mut rng = RngStream::new(77, 5).rng();
    for case in 0..100 {
        let budget = rng.gen_range(1..=150u64);
        let d = rng.gen_range(1..=3usize);
        let k = if rng.gen_bool(0.5) { 3 } else { 5 };
        let m = rng.gen_range(1..=8u64);
        let eta = rng.gen_range(0.1..0.9);
        let n = rng.gen_range(5..=30usize);
        let name = FunctionName::ALL[rng.gen_range(0..4usize)];
        let f = make_function(name, d.min(n), n, rng.gen()).map_err(|e| e.to_string())?;
        let cfg = OptimizerConfig {
            budget,
            k,
            h_max: default_h_max(budget),
            m,
            eta,
            d,
            seed: rng.gen(),
        };
        let mut runs: Vec<(&str, RunResult)> = Vec::new();
        let r = embedded_hunter(&f, &cfg).map_err(|e| e.to_string())?;
        check(
            f.call_count() == r.evaluations_used,
            format!("case {case}: eh call counter disagrees"),
        )?;
        runs.push(("embedded_hunter", r));
        f.reset_call_count();
        runs.push(("random_search", random_search(&f, &cfg).map_err(|e| e.to_string())?));
        if budget >= m {
            f.reset_call_count();
            runs.push(("resoo", resoo(&f, &cfg).map_err(|e| e.to_string())?));
            f.reset_call_count();
            runs.push(("sresoo", sresoo(&f, &cfg).map_err(|e| e.to_string())?));
        }
        for (label, r) in &runs {
            check(
                r.evaluations_used <= budget,
                format!("case {case} {label}: used {} > budget {budget}", r.evaluations_used),
            )?;
            check(
                r.stopped_early || r.evaluations_used == budget,
                format!(
                    "case {case} {label}: used {} of {budget} without stopping early",
                    r.evaluations_used
                ),
            )?;
            check(
                r.curve.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0),
                format!("case {case} {label}: regret curve not monotone"),
            )?;
        }
    }
    Ok(())
}

// 6. Both tree searches reproduce the hand-executed trace action-for-action.
fn criterion_hand_trace() -> Result<(), String> {
    fn encode(events: &[TraceEvent]) -> String {
        events
            .iter()
            .map(|e| format!("{}:{}:{}:{:?}", e.t, e.depth, e.index, e.action))
            .collect::<Vec<_>>()
            .join(" ")
    }

    // deterministic search, g(y) = (y - 1/2)^2 on [-1,1], K=3, v=10
    let space = BoxSpace::symmetric(1, 1.0).map_err(|e| e.to_string())?;
    let mut src = BudgetedFn::new(|y: &[f64]| (y[0] - 0.5) * (y[0] - 0.5), 10);
    let mut events = Vec::new();
    let mut sink = |e: TraceEvent| events.push(e);
    let r = run_soo(&mut src, &space, 3, 3, Some(&mut sink)).map_err(|e| e.to_string())?;
    let expected = "1:0:0:Init 1:0:0:Select 1:0:0:Expand 1:1:0:EvalChild 1:1:1:InheritChild \
                    1:1:2:EvalChild 2:1:2:Select 2:1:2:Expand 2:2:6:EvalChild 2:2:7:InheritChild \
                    2:2:8:EvalChild 3:2:6:Select 3:2:6:Expand 3:3:18:EvalChild 3:3:19:InheritChild \
                    3:3:20:EvalChild 4:3:20:Select 6:1:1:Select 6:1:1:Expand 6:2:3:EvalChild \
                    6:2:4:InheritChild 6:2:5:EvalChild 7:2:7:Select 7:2:7:Expand 7:3:21:EvalChild \
                    7:3:22:InheritChild";
    check(
        encode(&events) == expected,
        format!("deterministic-search trace drifted: {}", encode(&events)),
    )?;
    check(r.evaluations_used == 10, "deterministic search did not spend 10 evals".into())?;

    // embedded search with the identity hook on [-2,2], K=3, v=10, M=5
    let space = BoxSpace::symmetric(1, 2.0).map_err(|e| e.to_string())?;
    let g = |y: &[f64]| {
        let x = y[0].clamp(-1.0, 1.0);
        (x - 0.5) * (x - 0.5)
    };
    let mut src = BudgetedFn::new(g, 10);
    let mut events = Vec::new();
    let mut sink = |e: TraceEvent| events.push(e);
    let (r, _) =
        embedded_hunter::optimizers::run_embedded_hunter(&mut src, &space, 3, 3, 5, Some(&mut sink))
            .map_err(|e| e.to_string())?;
    let expected = "1:0:0:Init 1:0:0:Select 1:0:0:Expand 1:1:0:EvalChild 1:1:1:InheritChild \
                    1:1:2:EvalChild 2:1:2:Select 2:1:1:Select 4:1:2:Select 4:1:2:Expand \
                    4:2:6:EvalChild 4:2:7:EvalChild 4:2:8:EvalChild 4:1:1:Select 5:2:8:Select \
                    5:2:7:Select 5:2:6:Select 5:2:6:Expand 5:3:18:EvalChild 5:3:19:EvalChild \
                    5:3:20:EvalChild 6:3:20:Select 6:3:19:Select 6:3:18:Select 8:1:0:Select \
                    8:1:0:Expand 8:2:0:EvalChild";
    check(
        encode(&events) == expected,
        format!("embedded-search trace drifted: {}", encode(&events)),
    )?;
    let y_best = 2.0 * (10.0 / 27.0);
    check(
        r.best_value == (y_best - 0.5) * (y_best - 0.5) && r.evaluations_used == 10,
        "embedded-search outcome drifted".into(),
    )
}

// 7. Pooled entry mean and variance of the sampled Gaussian matrices.
fn criterion_sampling_statistics() -> Result<(), String> {
    for (n, d, draws) in [(100usize, 10usize, 100u32), (10_000, 10, 1)] {
        let mut src = MatrixSource::new(RngStream::new(11, 9));
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut count = 0usize;
        for _ in 0..draws {
            let a = sample_matrix(n, d, &mut src);
            for &e in a.entries() {
                sum += e;
                sumsq += e * e;
            }
            count += n * d;
        }
        check(count >= 100_000, format!("n={n}: only {count} entries pooled"))?;
        let mean = sum / count as f64;
        // entries are N(0, 1/n): the pooled mean has sd 1/sqrt(count * n)
        let se = 1.0 / ((count as f64) * n as f64).sqrt();
        check(
            mean.abs() <= 3.0 * se,
            format!("n={n}: pooled mean {mean} exceeds 3 s.e. {se}"),
        )?;
        let var = sumsq / count as f64;
        let target = 1.0 / n as f64;
        check(
            (var - target).abs() <= 0.05 * target,
            format!("n={n}: pooled variance {var} not within 5% of {target}"),
        )?;
    }
    Ok(())
}

// Shared desk-scale convergence experiment for criteria 8 and 9.
fn desk_convergence() -> Result<embedded_hunter::bench::ExperimentOutcome, String> {
    let cfg = ExperimentConfig {
        swept: Some(vec![100, 500, 2_000]),
        n: 1_000,
        d: 5,
        repetitions: 10,
        functions: vec![FunctionName::Ellipsoid],
        algorithms: vec![
            AlgorithmName::EmbeddedHunter,
            AlgorithmName::Resoo,
            AlgorithmName::Sresoo,
            AlgorithmName::RandomSearch,
        ],
        seed: 2024,
        ..ExperimentConfig::new(Family::Convergence, 2024)
    };
    run_experiment(&cfg).map_err(|e| e.to_string())
}

// 8. EmbeddedHunter <= RESOO <= random search in mean final regret at
//    v=2000, Ellipsoid, n=1000, d_eff = search d = 5, M=5, 10 repetitions.
fn criterion_figure_ordering(
    outcome: &embedded_hunter::bench::ExperimentOutcome,
) -> Result<(), String> {
    let mean_at = |alg: AlgorithmName| -> f64 {
        let regrets: Vec<f64> = outcome
            .rows
            .iter()
            .filter(|r| r.algorithm == alg && r.swept_value == 2_000)
            .map(|r| r.final_regret)
            .collect();
        regrets.iter().sum::<f64>() / regrets.len() as f64
    };
    let eh = mean_at(AlgorithmName::EmbeddedHunter);
    let re = mean_at(AlgorithmName::Resoo);
    let rs = mean_at(AlgorithmName::RandomSearch);
    check(
        eh <= re && re <= rs,
        format!("ordering violated: embedded_hunter {eh}, resoo {re}, random_search {rs}"),
    )
}

// 9. Mean regret nonincreasing in the budget within one pooled standard
//    error, per algorithm.
fn criterion_convergence_monotone(
    outcome: &embedded_hunter::bench::ExperimentOutcome,
) -> Result<(), String> {
    for alg in [
        AlgorithmName::EmbeddedHunter,
        AlgorithmName::Resoo,
        AlgorithmName::Sresoo,
        AlgorithmName::RandomSearch,
    ] {
        let stats: Vec<(u64, f64, f64)> = [100u64, 500, 2_000]
            .iter()
            .map(|&v| {
                let regrets: Vec<f64> = outcome
                    .rows
                    .iter()
                    .filter(|r| r.algorithm == alg && r.swept_value == v)
                    .map(|r| r.final_regret)
                    .collect();
                let n = regrets.len() as f64;
                let mean = regrets.iter().sum::<f64>() / n;
                let var =
                    regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                (v, mean, (var / n).sqrt())
            })
            .collect();
        for w in stats.windows(2) {
            let (v0, m0, s0) = w[0];
            let (v1, m1, s1) = w[1];
            let pooled = (s0 * s0 + s1 * s1).sqrt();
            check(
                m1 <= m0 + pooled,
                format!("{alg}: mean regret rose from {m0} (v={v0}) to {m1} (v={v1}), pooled s.e. {pooled}"),
            )?;
        }
    }
    Ok(())
}

// 10. Same master seed, byte-identical CSVs.
fn criterion_determinism() -> Result<(), String> {
    let cfg = ExperimentConfig {
        swept: Some(vec![20, 60]),
        n: 60,
        d: 3,
        repetitions: 2,
        functions: vec![FunctionName::Ackley],
        algorithms: vec![AlgorithmName::EmbeddedHunter, AlgorithmName::Resoo],
        seed: 55,
        ..ExperimentConfig::new(Family::Convergence, 55)
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    write_outcome(&run_experiment(&cfg).map_err(|e| e.to_string())?, &p1)
        .map_err(|e| e.to_string())?;
    write_outcome(&run_experiment(&cfg).map_err(|e| e.to_string())?, &p2)
        .map_err(|e| e.to_string())?;
    let a = std::fs::read(&p1).map_err(|e| e.to_string())?;
    let b = std::fs::read(&p2).map_err(|e| e.to_string())?;
    check(a == b, "reruns with one master seed produced different CSV bytes".into())
}

#[test]
fn acceptance_gate() {
    let mut gate = Gate::new();
    gate.record(1, "projection examples", criterion_projection());
    gate.record(2, "mean-difference bound", criterion_mean_diff_bound());
    gate.record(3, "matrix-norm bound", criterion_matrix_norm_bound());
    gate.record(4, "zero vector evaluated once", criterion_zero_vector_once());
    gate.record(5, "budget exactness", criterion_budget_exactness());
    gate.record(6, "hand-trace oracle", criterion_hand_trace());
    gate.record(7, "sampling statistics", criterion_sampling_statistics());
    match desk_convergence() {
        Ok(outcome) => {
            gate.record(8, "desk-scale ordering", criterion_figure_ordering(&outcome));
            gate.record(9, "convergence monotonicity", criterion_convergence_monotone(&outcome));
        }
        Err(e) => {
            gate.record(8, "desk-scale ordering", Err(e.clone()));
            gate.record(9, "convergence monotonicity", Err(e));
        }
    }
    gate.record(10, "csv determinism", criterion_determinism());
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
