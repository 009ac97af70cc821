//! Picks the sample-count multipliers k_pure and k_mixed from a fixed grid.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::learners::{Calibration, LearnerConfig, SampleKind};

use super::experiment::{default_loop_ceiling, run_experiment, ClassSource, ExperimentSpec, LearnerKind};
use super::generators::Generator;

pub const K_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Joint dimension the mixed learner's per-loop samples are held to by default for outputs
/// other than qubits.
pub const MIXED_JOINT_DIM: usize = 64;

/// Dimension cap of the mixed calibration classes.
pub const MIXED_DIM_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationTarget {
    pub kind: SampleKind,
    pub generator: Generator,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub max_loop_samples: Option<usize>,
}

impl CalibrationTarget {
    fn config(&self, k: f64, base: &LearnerConfig) -> LearnerConfig {
        let mut cfg = LearnerConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            max_loop_samples: self.max_loop_samples,
            dim_cap: match self.kind {
                SampleKind::Pure => base.dim_cap,
                SampleKind::Mixed => base.dim_cap.max(MIXED_DIM_CAP),
            },
            ..base.clone()
        };
        match self.kind {
            SampleKind::Pure => cfg.k_pure = k,
            SampleKind::Mixed => cfg.k_mixed = k,
        }
        cfg
    }
}

/// Pure classes: random_pure with |C| ∈ {4, 16}, d2 ∈ {2, 4}, ε = 0.2, δ = 0.1. Mixed classes:
/// random_mixed and clustered with |C| ∈ {4, 8}, d2 = 2, ε = 0.3, δ = 0.2, per-loop samples
/// held to what a 4096 dimension cap allows.
pub fn default_targets(trials: usize) -> Vec<CalibrationTarget> {
    let mut targets = Vec::new();
    for n in [4, 16] {
        for d2 in [2, 4] {
            targets.push(CalibrationTarget {
                kind: SampleKind::Pure,
                generator: Generator::RandomPure { n, d1: 2, d2 },
                epsilon: 0.2,
                delta: 0.1,
                trials,
                max_loop_samples: None,
            });
        }
    }
    for n in [4, 8] {
        for generator in [
            Generator::RandomMixed { n, d1: 2, d2: 2, rank: None },
            Generator::Clustered { n, d1: 2, d2: 2, clusters: 2, spread: 0.1 },
        ] {
            targets.push(CalibrationTarget {
                kind: SampleKind::Mixed,
                generator,
                epsilon: 0.3,
                delta: 0.2,
                trials,
                max_loop_samples: Some(default_loop_ceiling(2, MIXED_DIM_CAP)),
            });
        }
    }
    targets
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationEval {
    pub kind: SampleKind,
    pub k: f64,
    pub generator: Generator,
    pub success_rate: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationReport {
    pub calibration: Calibration,
    pub evaluations: Vec<CalibrationEval>,
    pub trials_used: usize,
}

/// For each kind present in `targets`, the smallest grid value whose success rate is at least
/// 1 − δ on every target of that kind. Kinds without targets keep their value from `base`.
/// Each target reuses one seed across the grid.
pub fn calibrate_constants<R: Rng + ?Sized>(
    targets: &[CalibrationTarget],
    budget: usize,
    base: &LearnerConfig,
    rng: &mut R,
) -> Result<CalibrationReport> {
    if targets.is_empty() {
        return Err(Error::InvalidParams("no calibration classes given".into()));
    }
    let seeds: Vec<u64> = targets.iter().map(|_| rng.random()).collect();
    let mut calibration = Calibration { k_pure: base.k_pure, k_mixed: base.k_mixed };
    let mut evaluations = Vec::new();
    let mut trials_used = 0;

    for kind in [SampleKind::Pure, SampleKind::Mixed] {
        let mine: Vec<usize> = (0..targets.len()).filter(|&i| targets[i].kind == kind).collect();
        if mine.is_empty() {
            continue;
        }
        let mut chosen = None;
        for k in K_GRID {
            let mut all_pass = true;
            for &i in &mine {
                let target = &targets[i];
                trials_used += target.trials;
                if trials_used > budget {
                    return Err(Error::CalibrationFailed(format!(
                        "trial budget {budget} exhausted before a multiplier was found"
                    )));
                }
                let report = run_experiment(&ExperimentSpec {
                    source: ClassSource::Generate(target.generator.clone()),
                    learner: match kind {
                        SampleKind::Pure => LearnerKind::Pure,
                        SampleKind::Mixed => LearnerKind::Mixed,
                    },
                    config: target.config(k, base),
                    trials: target.trials,
                    seed: seeds[i],
                    out: None,
                })?;
                let rate = report.aggregates.success_rate;
                let passed = rate >= 1.0 - target.delta;
                evaluations.push(CalibrationEval { kind, k, generator: target.generator.clone(), success_rate: rate, passed });
                all_pass &= passed;
            }
            if all_pass {
                chosen = Some(k);
                break;
            }
        }
        let k = chosen.ok_or_else(|| {
            Error::CalibrationFailed(format!("no multiplier in {K_GRID:?} reaches 1 - delta for {kind:?}"))
        })?;
        match kind {
            SampleKind::Pure => calibration.k_pure = k,
            SampleKind::Mixed => calibration.k_mixed = k,
        }
    }
    Ok(CalibrationReport { calibration, evaluations, trials_used })
}
