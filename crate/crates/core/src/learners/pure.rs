use rand::Rng;

use crate::channels::{ConceptClass, SampleAccess};
use crate::error::{Error, Result};
use crate::qmath::haar_basis;

use super::config::{choose_sample_count, LearnerConfig, SampleKind};
use super::LearnerRun;

/// Added inside the log so a zero Born probability is maximally penalized but finite.
pub const LOG_FLOOR: f64 = 1e-300;
/// Outputs with 1 − tr(ρ²) above this are treated as mixed.
pub const PURITY_TOL: f64 = 1e-8;

/// Maximum-likelihood learner for classes whose outputs are all pure: measure every sample in
/// a fresh Haar-random basis and return the concept most likely to have produced the outcomes.
pub fn learn_pure<R: Rng + ?Sized>(
    oracle: &mut dyn SampleAccess,
    class: &ConceptClass,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<LearnerRun> {
    cfg.validate()?;
    if let Some((concept, input)) = class.first_mixed_output(PURITY_TOL) {
        return Err(Error::NotPureClass { concept, input });
    }
    check_oracle_dims(oracle, class)?;
    if class.len() == 1 {
        return Ok(LearnerRun { hypothesis: 0, loops: 0, final_candidates: vec![0] });
    }

    let samples = choose_sample_count(SampleKind::Pure, class.len(), cfg);
    let handles = oracle.draw(samples);
    let mut log_likelihood = vec![0.0f64; class.len()];
    for handle in &handles {
        let basis = haar_basis(handle.dim(), rng);
        let outcome = oracle.measure(std::slice::from_ref(handle), &basis)?;
        let x = handle.input();
        for (ll, concept) in log_likelihood.iter_mut().zip(class.concepts()) {
            let p = basis.raw_probability(outcome, concept.output(x)).max(0.0);
            *ll += (p + LOG_FLOOR).ln();
        }
    }
    Ok(LearnerRun { hypothesis: argmax_lowest(&log_likelihood), loops: 1, final_candidates: (0..class.len()).collect() })
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_oracle_dims(oracle: &dyn SampleAccess, class: &ConceptClass) -> Result<()> {
    if oracle.in_dim() != class.in_dim() {
        return Err(Error::DimMismatch { expected: class.in_dim(), found: oracle.in_dim() });
    }
    if oracle.out_dim() != class.out_dim() {
        return Err(Error::DimMismatch { expected: class.out_dim(), found: oracle.out_dim() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ChannelConcept, InputDistribution, SampleOracle};
    use crate::qmath::DensityMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn orthogonal_pair() -> ConceptClass {
        ConceptClass::new(vec![
            ChannelConcept::constant(DensityMatrix::basis(2, 0), 1),
            ChannelConcept::constant(DensityMatrix::basis(2, 1), 1),
        ])
        .unwrap()
    }

    #[test]
    fn singleton_class_skips_sampling() {
        let class = ConceptClass::new(vec![ChannelConcept::constant(DensityMatrix::basis(2, 0), 1)]).unwrap();
        let mut oracle = SampleOracle::new(&class, 0, InputDistribution::uniform(1), 1).unwrap();
        let run = learn_pure(&mut oracle, &class, &LearnerConfig::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(run.hypothesis, 0);
        assert_eq!(oracle.samples_drawn(), 0);
    }

    #[test]
    fn duplicates_resolve_to_lowest_index() {
        let c = ChannelConcept::constant(DensityMatrix::basis(2, 0), 1);
        let class = ConceptClass::new(vec![c.clone(), c]).unwrap();
        for seed in 0..10 {
            let mut oracle = SampleOracle::new(&class, 1, InputDistribution::uniform(1), seed).unwrap();
            let run = learn_pure(&mut oracle, &class, &LearnerConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed))
                .unwrap();
            assert_eq!(run.hypothesis, 0);
        }
    }

    #[test]
    fn rejects_mixed_outputs() {
        let class = ConceptClass::new(vec![
            ChannelConcept::constant(DensityMatrix::basis(2, 0), 1),
            ChannelConcept::constant(DensityMatrix::maximally_mixed(2), 1),
        ])
        .unwrap();
        let mut oracle = SampleOracle::new(&class, 0, InputDistribution::uniform(1), 1).unwrap();
        let err = learn_pure(&mut oracle, &class, &LearnerConfig::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert!(matches!(err, Err(Error::NotPureClass { concept: 1, input: 0 })));
    }

    #[test]
    fn orthogonal_pair_is_learned() {
        let class = orthogonal_pair();
        let cfg = LearnerConfig { epsilon: 0.5, delta: 0.1, ..LearnerConfig::default() };
        let mut hits = 0;
        for trial in 0..200u64 {
            let target = (trial % 2) as usize;
            let mut oracle = SampleOracle::new(&class, target, InputDistribution::uniform(1), trial).unwrap();
            let run = learn_pure(&mut oracle, &class, &cfg, &mut ChaCha8Rng::seed_from_u64(trial + 1000)).unwrap();
            hits += usize::from(run.hypothesis == target);
        }
        assert!(hits >= 180, "{hits}/200");
    }

    #[test]
    fn argmax_ties() {
        assert_eq!(argmax_lowest(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax_lowest(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), 0);
    }
}
