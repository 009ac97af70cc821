//! Generators, the Monte-Carlo experiment runner, constant calibration, verification suites
//! and class persistence behind the `qpac` binary.

mod calibrate;
mod experiment;
mod generators;
mod verify;

use std::path::Path;

use crate::channels::{class_from_json, class_to_json, ConceptClass};
use crate::error::Result;

pub use calibrate::{
    calibrate_constants, default_targets, CalibrationEval, CalibrationReport, CalibrationTarget, K_GRID,
    MIXED_DIM_CAP, MIXED_JOINT_DIM,
};
pub use experiment::{
    default_loop_ceiling, loop_ceiling, run_experiment, splitmix64, trial_seed, Aggregates, ClassSource, ExperimentSpec, LearnerKind,
    TrialRecord, TrialReport,
};
pub use generators::{gen_class, haar_pure, wishart_state, Generator};
pub use verify::{
    birthday_demo, grouped_pgm_lhs, partition_hand_traces, quantile, random_pseudometric, random_separated_instance,
    random_state, verify_block_lemma, verify_bsd, verify_fidelity_laws, verify_partition, verify_pgm_bound,
    verify_sen, BirthdayReport, BirthdayRow, BlockLemmaReport, BsdReport, FidelityLawsReport, PartitionReport,
    PgmBoundReport, SenEstimate, SenReport,
};

pub fn save_class(path: &Path, class: &ConceptClass) -> Result<()> {
    std::fs::write(path, class_to_json(class))?;
    Ok(())
}

pub fn load_class(path: &Path) -> Result<ConceptClass> {
    class_from_json(&std::fs::read_to_string(path)?)
}
