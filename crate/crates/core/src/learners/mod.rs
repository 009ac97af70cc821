//! The learners: pure-output maximum likelihood, the partition routine, the mixed-output
//! learner, and approximate state discrimination.

mod config;
mod mixed;
mod partition;
mod pure;

use rand::Rng;
use serde::Serialize;

use crate::channels::{ChannelConcept, ConceptClass, SampleAccess};
use crate::error::{Error, Result};
use crate::qmath::DensityMatrix;

pub use config::{choose_sample_count, Calibration, LearnerConfig, SampleKind, DEFAULTS_TOML};
pub use mixed::{learn_mixed, mixed_loop_samples};
pub use partition::{partition, partition_gamma, PartitionResult};
pub use pure::{learn_pure, LOG_FLOOR, PURITY_TOL};

/// Outcome of one learner run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LearnerRun {
    pub hypothesis: usize,
    /// Sampling rounds performed (0 when the class is a singleton).
    pub loops: usize,
    /// Concepts still under consideration when the learner stopped.
    pub final_candidates: Vec<usize>,
}

/// Identifies, up to ε in trace distance, which state of `states` the oracle's copies come
/// from. Each state becomes a constant concept on a single input; the pure learner handles
/// all-pure sets and the mixed learner everything else.
pub fn approx_discriminate<R: Rng + ?Sized>(
    oracle: &mut dyn SampleAccess,
    states: &[DensityMatrix],
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<usize> {
    approx_discriminate_run(oracle, states, cfg, rng).map(|run| run.hypothesis)
}

/// [`approx_discriminate`] with the full run record.
pub fn approx_discriminate_run<R: Rng + ?Sized>(
    oracle: &mut dyn SampleAccess,
    states: &[DensityMatrix],
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<LearnerRun> {
    let class = constant_class(states)?;
    if class.first_mixed_output(PURITY_TOL).is_none() {
        learn_pure(oracle, &class, cfg, rng)
    } else {
        learn_mixed(oracle, &class, cfg, rng)
    }
}

/// One constant single-input concept per state.
pub fn constant_class(states: &[DensityMatrix]) -> Result<ConceptClass> {
    if states.is_empty() {
        return Err(Error::EmptySet);
    }
    ConceptClass::new(states.iter().map(|s| ChannelConcept::constant(s.clone(), 1)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{InputDistribution, SampleOracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle_for(states: &[DensityMatrix], target: usize, seed: u64) -> SampleOracle {
        SampleOracle::new(&constant_class(states).unwrap(), target, InputDistribution::uniform(1), seed).unwrap()
    }

    #[test]
    fn asd_singleton_and_duplicates() {
        let rho = DensityMatrix::maximally_mixed(2);
        let cfg = LearnerConfig { max_loop_samples: Some(4), ..LearnerConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(approx_discriminate(&mut oracle_for(&[rho.clone()], 0, 1), &[rho.clone()], &cfg, &mut rng).unwrap(), 0);

        let pure = DensityMatrix::basis(2, 1);
        let pair = [pure.clone(), pure];
        assert_eq!(approx_discriminate(&mut oracle_for(&pair, 1, 2), &pair, &cfg, &mut rng).unwrap(), 0);
    }

    #[test]
    fn asd_orthogonal_pair() {
        let states = [DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)];
        let cfg = LearnerConfig { epsilon: 0.5, delta: 0.1, ..LearnerConfig::default() };
        let mut hits = 0;
        for trial in 0..200u64 {
            let target = (trial % 2) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(trial);
            let got = approx_discriminate(&mut oracle_for(&states, target, trial + 9), &states, &cfg, &mut rng).unwrap();
            hits += usize::from(got == target);
        }
        assert!(hits >= 180, "{hits}/200");
    }

    #[test]
    fn asd_rejects_empty() {
        let states: [DensityMatrix; 0] = [];
        let mut o = oracle_for(&[DensityMatrix::basis(2, 0)], 0, 0);
        let err = approx_discriminate(&mut o, &states, &LearnerConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(Error::EmptySet)));
    }
}
