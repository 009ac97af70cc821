use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpac::harness::{
    birthday_demo, default_loop_ceiling, run_experiment, verify_block_lemma, verify_bsd, verify_fidelity_laws,
    verify_partition, verify_pgm_bound, verify_sen, ClassSource, ExperimentSpec, Generator, LearnerKind,
};
use qpac::learners::LearnerConfig;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let ok = out.passed && elapsed <= limit;
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {verdict} {name}: {} [{:.1}s / {}s]", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    ok
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn pgm_bound() -> Outcome {
    let r = verify_pgm_bound(1000, 8, 6, &mut rng(1)).unwrap();
    Outcome { passed: r.violations == 0 && r.tol <= 1e-8, detail: format!("{} violations, max excess {:.2e}", r.violations, r.max_excess) }
}

fn block_lemma() -> Outcome {
    let r = verify_block_lemma(1000, 12, &mut rng(2)).unwrap();
    Outcome {
        passed: r.violations == 0 && r.tol <= 1e-9 && r.equality_gap <= 1e-12,
        detail: format!("{} violations over {} splits, equality gap {:.1e}", r.violations, r.splits, r.equality_gap),
    }
}

fn fidelity_laws() -> Outcome {
    let r = verify_fidelity_laws(10_000, 8, &mut rng(3)).unwrap();
    Outcome {
        passed: r.sandwich_violations == 0 && r.tensor_violations == 0 && r.tol <= 1e-8,
        detail: format!("{} sandwich / {} tensor violations", r.sandwich_violations, r.tensor_violations),
    }
}

fn partition() -> Outcome {
    let r = verify_partition(10_000, 64, &[0.05, 0.2, 0.5], &mut rng(4)).unwrap();
    Outcome {
        passed: r.violations == 0 && r.hand_traces_ok,
        detail: format!("{} violations, hand traces {}", r.violations, if r.hand_traces_ok { "ok" } else { "differ" }),
    }
}

fn bsd() -> Outcome {
    let r = verify_bsd(200, 8, 4, 5000, 0.01, &mut rng(5)).unwrap();
    Outcome { passed: r.violations == 0, detail: format!("{} violations, max excess {:.3}", r.violations, r.max_excess) }
}

fn learner_runs(
    learner: LearnerKind,
    classes: Vec<Generator>,
    config: LearnerConfig,
    trials: usize,
    threshold: f64,
    max_loops: impl Fn(&Generator) -> Option<usize>,
) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, g) in classes.into_iter().enumerate() {
        let spec = ExperimentSpec {
            source: ClassSource::Generate(g.clone()),
            learner,
            config: config.clone(),
            trials,
            seed: 600 + i as u64,
            out: None,
        };
        let a = run_experiment(&spec).unwrap().aggregates;
        let loops_ok = max_loops(&g).is_none_or(|m| a.max_loops <= m);
        passed &= a.success_rate >= threshold && loops_ok && a.errors == 0;
        parts.push(format!("{} {:.3} (loops {})", label(&g), a.success_rate, a.max_loops));
    }
    Outcome { passed, detail: parts.join(", ") }
}

fn label(g: &Generator) -> String {
    match g {
        Generator::RandomPure { n, d2, .. } => format!("random_pure n={n} d2={d2}"),
        Generator::RandomMixed { n, .. } => format!("random_mixed n={n}"),
        Generator::Clustered { n, .. } => format!("clustered n={n}"),
        other => other.name().to_string(),
    }
}

fn pure_learner() -> Outcome {
    let classes = [(4, 2), (4, 8), (16, 2), (16, 8)]
        .into_iter()
        .map(|(n, d2)| Generator::RandomPure { n, d1: 2, d2 })
        .collect();
    let config = LearnerConfig { epsilon: 0.2, delta: 0.1, ..LearnerConfig::default() };
    learner_runs(LearnerKind::Pure, classes, config, 300, 0.90 - 0.035, |_| None)
}

fn mixed_learner() -> Outcome {
    let mut classes = Vec::new();
    for n in [4, 8] {
        classes.push(Generator::RandomMixed { n, d1: 2, d2: 2, rank: None });
        classes.push(Generator::Clustered { n, d1: 2, d2: 2, clusters: 2, spread: 0.1 });
    }
    let config = LearnerConfig {
        epsilon: 0.3,
        delta: 0.2,
        dim_cap: 4096,
        max_loop_samples: Some(default_loop_ceiling(2, 4096)),
        ..LearnerConfig::default()
    };
    let loop_bound = |g: &Generator| {
        let n = match g {
            Generator::RandomMixed { n, .. } | Generator::Clustered { n, .. } => *n,
            _ => unreachable!(),
        };
        Some(((n as f64).ln() / (9.0f64 / 8.0).ln()).ceil() as usize + 1)
    };
    learner_runs(LearnerKind::Mixed, classes, config, 200, 0.80 - 0.06, loop_bound)
}

fn sen() -> Outcome {
    let r = verify_sen(&[4, 16, 64], 500, &mut rng(8)).unwrap();
    let p5: Vec<f64> = r.estimates.iter().map(|e| e.p5).collect();
    let passed = p5.iter().all(|&p| p >= 0.1) && p5[2] >= 0.5 * p5[0];
    Outcome { passed, detail: format!("p5 = {:.3} / {:.3} / {:.3}", p5[0], p5[1], p5[2]) }
}

fn birthday() -> Outcome {
    let r = birthday_demo(&[100, 400, 1600], 500, &mut rng(9)).unwrap();
    let medians: Vec<String> = r.rows.iter().map(|row| format!("{}", row.median_d1)).collect();
    Outcome {
        passed: (2.5..=6.5).contains(&r.ratio),
        detail: format!("medians {}, ratio {:.2}", medians.join(" / "), r.ratio),
    }
}

fn determinism() -> Outcome {
    let verbs: [&[&str]; 4] = [
        &["--seed", "21", "--trials", "20", "run-pure", "--n", "4", "--d1", "2"],
        &["--seed", "21", "--trials", "3", "--dim-cap", "256", "run-mixed", "--kind", "clustered", "--n", "4", "--d1", "2"],
        &["--seed", "21", "gen-class", "--kind", "random-mixed", "--n", "3"],
        &["--seed", "21", "--trials", "100", "verify", "partition"],
    ];
    let run = |args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_qpac")).args(args).output().expect("binary runs");
        let text = String::from_utf8(o.stdout).unwrap();
        let kept: Vec<&str> = text.lines().filter(|l| !l.trim_start().starts_with("\"ms\":")).collect();
        (o.status.code(), kept.join("\n"))
    };
    let mut identical = 0;
    for args in verbs {
        let (a, b) = (run(args), run(args));
        if a == b && a.0 == Some(0) && !a.1.is_empty() {
            identical += 1;
        }
    }
    Outcome { passed: identical == verbs.len(), detail: format!("{identical}/{} verbs byte-identical", verbs.len()) }
}

fn main() -> ExitCode {
    let results = [
        check(1, "grouped PGM bound", Duration::from_secs(60), pgm_bound),
        check(2, "block lemma", Duration::from_secs(30), block_lemma),
        check(3, "fidelity laws", Duration::from_secs(60), fidelity_laws),
        check(4, "partition", Duration::from_secs(120), partition),
        check(5, "BSD guarantee", mins(10), bsd),
        check(6, "pure learner", mins(15), pure_learner),
        check(7, "mixed learner", mins(45), mixed_learner),
        check(8, "Sen constant", mins(5), sen),
        check(9, "birthday demo", mins(2), birthday),
        check(10, "determinism", mins(1), determinism),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
