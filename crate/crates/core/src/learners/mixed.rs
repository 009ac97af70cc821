use rand::Rng;

use crate::channels::{
    compressed_sample_state, distance_matrix_of, input_groups, ConceptClass, InputDistribution, SampleAccess,
};
use crate::discrimination::{helstrom_binary, minimax_bsd, minimax_step, BinaryMeasurement, BsdInstance};
use crate::error::{Error, Result};
use crate::qmath::{tensor_all, DensityMatrix};

use super::config::{choose_sample_count, LearnerConfig, SampleKind};
use super::partition::partition;
use super::pure::check_oracle_dims;
use super::LearnerRun;

/// Per-loop sample count after the optional ceiling, checked against the dimension cap.
pub fn mixed_loop_samples(class_size: usize, out_dim: usize, cfg: &LearnerConfig) -> Result<usize> {
    let mut samples = choose_sample_count(SampleKind::Mixed, class_size, cfg);
    if let Some(ceiling) = cfg.max_loop_samples {
        samples = samples.min(ceiling);
    }
    let required = u32::try_from(samples).ok().and_then(|t| out_dim.checked_pow(t)).unwrap_or(usize::MAX);
    if required > cfg.dim_cap {
        return Err(Error::DimCapExceeded { required, cap: cfg.dim_cap });
    }
    Ok(samples)
}

/// Learner for arbitrary (mixed) outputs. Each loop draws fresh samples, partitions the
/// surviving concepts, and measures the joint sample state with a yes/no discriminator between
/// the amplified yes and no groups, pruning the side the outcome rules out.
pub fn learn_mixed<R: Rng + ?Sized>(
    oracle: &mut dyn SampleAccess,
    class: &ConceptClass,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<LearnerRun> {
    cfg.validate()?;
    check_oracle_dims(oracle, class)?;
    let mut remaining: Vec<usize> = (0..class.len()).collect();
    if class.len() == 1 {
        return Ok(LearnerRun { hypothesis: 0, loops: 0, final_candidates: remaining });
    }
    let samples = mixed_loop_samples(class.len(), class.out_dim(), cfg)?;
    let mut loops = 0;

    loop {
        loops += 1;
        let handles = oracle.draw(samples);
        let inputs: Vec<usize> = handles.iter().map(|h| h.input()).collect();

        // D is hidden from the learner; distances use the empirical input distribution of this
        // loop's samples, which is what the amplified states below actually depend on
        let empirical = InputDistribution::empirical(class.in_dim(), &inputs)?;
        let survivors: Vec<_> = remaining.iter().map(|&i| class.get(i)).collect();
        let distances = distance_matrix_of(&survivors, &empirical)?;
        let part = partition(&distances, cfg.epsilon, cfg.gamma_divisor, rng)?;
        let center = remaining[part.c_c];

        if part.s_no.is_empty() {
            return Ok(LearnerRun { hypothesis: center, loops, final_candidates: remaining });
        }

        // qubit samples are measured symmetrically, in compressed form
        let symmetric = class.out_dim() == 2;
        let groups = input_groups(&handles);
        let amplified = |local: &[usize]| -> Result<Vec<DensityMatrix>> {
            local
                .iter()
                .map(|&k| {
                    let concept = class.get(remaining[k]);
                    if symmetric {
                        compressed_sample_state(concept, &groups, cfg.dim_cap)
                    } else {
                        tensor_all(inputs.iter().map(|&x| concept.output(x)), cfg.dim_cap)
                    }
                })
                .collect()
        };
        let yes_states = amplified(&part.s_yes)?;
        let no_states = amplified(&part.s_no)?;
        let measurement = discriminator(yes_states, no_states, cfg)?;
        let povm = measurement.to_povm();
        let outcome =
            if symmetric { oracle.measure_symmetric(&handles, &povm)? } else { oracle.measure(&handles, &povm)? };
        let said_yes = outcome == 0;

        let drop: &[usize] = match (said_yes, part.flag_extreme) {
            (false, _) => &part.s_yes,
            (true, false) => &part.s_no,
            (true, true) => {
                return Ok(LearnerRun { hypothesis: center, loops, final_candidates: remaining });
            }
        };
        let dropped: Vec<usize> = drop.iter().map(|&k| remaining[k]).collect();
        remaining.retain(|i| !dropped.contains(i));
        if remaining.len() == 1 {
            return Ok(LearnerRun { hypothesis: remaining[0], loops, final_candidates: remaining });
        }
    }
}

fn discriminator(yes: Vec<DensityMatrix>, no: Vec<DensityMatrix>, cfg: &LearnerConfig) -> Result<BinaryMeasurement> {
    if yes.len() == 1 && no.len() == 1 {
        return helstrom_binary(&yes[0].matrix().scale(0.5), &no[0].matrix().scale(0.5));
    }
    let inst = BsdInstance::from_sets(yes, no)?;
    minimax_bsd(&inst, cfg.bsd_rounds, minimax_step(inst.len(), cfg.bsd_rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ChannelConcept, SampleOracle};
    use crate::qmath::ComplexMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(a: f64) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[a, 1.0 - a])).unwrap()
    }

    fn cfg() -> LearnerConfig {
        LearnerConfig {
            epsilon: 0.3,
            delta: 0.2,
            dim_cap: 4096,
            max_loop_samples: Some(6),
            bsd_rounds: 100,
            ..LearnerConfig::default()
        }
    }

    #[test]
    fn singleton_returns_zero_without_sampling() {
        let class = ConceptClass::new(vec![ChannelConcept::constant(diag(0.9), 1)]).unwrap();
        let mut oracle = SampleOracle::new(&class, 0, InputDistribution::uniform(1), 1).unwrap();
        let run = learn_mixed(&mut oracle, &class, &cfg(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(run.hypothesis, 0);
        assert_eq!(oracle.samples_drawn(), 0);
    }

    #[test]
    fn identical_concepts_take_the_extreme_exit() {
        let class = ConceptClass::new(vec![ChannelConcept::constant(diag(0.7), 2); 5]).unwrap();
        for seed in 0..10 {
            let mut oracle = SampleOracle::new(&class, 3, InputDistribution::uniform(2), seed).unwrap();
            let run = learn_mixed(&mut oracle, &class, &cfg(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(run.loops, 1);
            assert!(run.hypothesis < 5);
        }
    }

    #[test]
    fn dim_cap_is_reported() {
        let class = ConceptClass::new(vec![
            ChannelConcept::constant(diag(0.9), 1),
            ChannelConcept::constant(diag(0.1), 1),
        ])
        .unwrap();
        let mut oracle = SampleOracle::new(&class, 0, InputDistribution::uniform(1), 1).unwrap();
        let tight = LearnerConfig { max_loop_samples: Some(13), ..cfg() };
        let err = learn_mixed(&mut oracle, &class, &tight, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::DimCapExceeded { required: 8192, cap: 4096 }));
    }

    #[test]
    fn diagonal_pair_is_learned() {
        let class = ConceptClass::new(vec![
            ChannelConcept::constant(diag(0.9), 1),
            ChannelConcept::constant(diag(0.1), 1),
        ])
        .unwrap();
        let mut hits = 0;
        for trial in 0..200u64 {
            let target = (trial % 2) as usize;
            let mut oracle = SampleOracle::new(&class, target, InputDistribution::uniform(1), trial).unwrap();
            let run = learn_mixed(&mut oracle, &class, &cfg(), &mut ChaCha8Rng::seed_from_u64(trial ^ 77)).unwrap();
            assert!(run.final_candidates.contains(&run.hypothesis));
            hits += usize::from(run.hypothesis == target);
        }
        assert!(hits >= 160, "{hits}/200");
    }

    #[test]
    fn qutrit_outputs_use_the_full_product() {
        let d3 = |a: f64| DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[a, 0.1, 0.9 - a])).unwrap();
        let class = ConceptClass::new(vec![
            ChannelConcept::constant(d3(0.8), 2),
            ChannelConcept::constant(d3(0.1), 2),
            ChannelConcept::constant(d3(0.45), 2),
        ])
        .unwrap();
        let qutrit = LearnerConfig { max_loop_samples: Some(3), ..cfg() };
        let mut hits = 0;
        for trial in 0..60u64 {
            let target = (trial % 3) as usize;
            let mut oracle = SampleOracle::new(&class, target, InputDistribution::uniform(2), trial).unwrap();
            let run = learn_mixed(&mut oracle, &class, &qutrit, &mut ChaCha8Rng::seed_from_u64(trial)).unwrap();
            assert_eq!(oracle.samples_drawn() % 3, 0);
            hits += usize::from(run.hypothesis == target);
        }
        assert!(hits >= 40, "{hits}/60");
    }
}
