//! The sample oracle and the measurement-only view learners get of it.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qmath::{compress_product, sample_outcome, tensor_all, DensityMatrix, Povm, DIM_CAP};

use super::concept::{ConceptClass, ChannelConcept, InputDistribution};

static NEXT_ORACLE_ID: AtomicU64 = AtomicU64::new(1);

/// Reference to one delivered copy of c*(x). Only the input label and the output dimension are
/// readable; the state itself can only be measured, once, through the oracle that issued it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenStateHandle {
    oracle: u64,
    id: u64,
    input: usize,
    dim: usize,
}

impl HiddenStateHandle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn input(&self) -> usize {
        self.input
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Everything a learner may do with the sample oracle.
pub trait SampleAccess {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    /// `count` i.i.d. samples (x, c*(x)) with x ~ D.
    fn draw(&mut self, count: usize) -> Vec<HiddenStateHandle>;
    /// Jointly measures the tensor product of the handles' hidden states and consumes them.
    fn measure(&mut self, handles: &[HiddenStateHandle], povm: &Povm) -> Result<usize>;
    /// Permutation-invariant measurement of qubit samples, given in the compressed
    /// representation of [`compressed_sample_state`] for the grouping [`input_groups`].
    fn measure_symmetric(&mut self, handles: &[HiddenStateHandle], povm: &Povm) -> Result<usize>;
}

/// (input, count) over the handles, inputs ascending.
pub fn input_groups(handles: &[HiddenStateHandle]) -> Vec<(usize, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for h in handles {
        *counts.entry(h.input).or_insert(0usize) += 1;
    }
    counts.into_iter().collect()
}

/// Compressed form of the joint sample state ⊗_x c(x)^{⊗m_x} of a qubit-output concept.
pub fn compressed_sample_state(concept: &ChannelConcept, groups: &[(usize, usize)], dim_cap: usize) -> Result<DensityMatrix> {
    let parts: Vec<_> = groups.iter().map(|&(x, m)| (concept.output(x), m)).collect();
    compress_product(&parts, dim_cap)
}

pub struct SampleOracle {
    id: u64,
    target_index: usize,
    target: ChannelConcept,
    dist: InputDistribution,
    rng: ChaCha8Rng,
    dim_cap: usize,
    /// input label of every handle issued so far, indexed by handle id
    draws: Vec<usize>,
    consumed: Vec<bool>,
    measurements: usize,
}

impl SampleOracle {
    pub fn new(class: &ConceptClass, target_index: usize, dist: InputDistribution, seed: u64) -> Result<Self> {
        if target_index >= class.len() {
            return Err(Error::InvalidParams(format!(
                "target index {target_index} out of range for a class of {}",
                class.len()
            )));
        }
        if dist.len() != class.in_dim() {
            return Err(Error::DimMismatch { expected: class.in_dim(), found: dist.len() });
        }
        Ok(Self {
            id: NEXT_ORACLE_ID.fetch_add(1, Ordering::Relaxed),
            target_index,
            target: class.get(target_index).clone(),
            dist,
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim_cap: DIM_CAP,
            draws: Vec::new(),
            consumed: Vec::new(),
            measurements: 0,
        })
    }

    pub fn with_dim_cap(mut self, dim_cap: usize) -> Self {
        self.dim_cap = dim_cap;
        self
    }

    /// Harness-side scoring access; not part of [`SampleAccess`].
    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn distribution(&self) -> &InputDistribution {
        &self.dist
    }

    /// Input labels of every sample drawn, in order.
    pub fn draw_log(&self) -> &[usize] {
        &self.draws
    }

    pub fn samples_drawn(&self) -> usize {
        self.draws.len()
    }

    pub fn measurements(&self) -> usize {
        self.measurements
    }
}

impl SampleAccess for SampleOracle {
    fn in_dim(&self) -> usize {
        self.target.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.target.out_dim()
    }

    fn draw(&mut self, count: usize) -> Vec<HiddenStateHandle> {
        let dim = self.target.out_dim();
        (0..count)
            .map(|_| {
                let input = self.dist.sample(&mut self.rng);
                let id = self.draws.len() as u64;
                self.draws.push(input);
                self.consumed.push(false);
                HiddenStateHandle { oracle: self.id, id, input, dim }
            })
            .collect()
    }

    fn measure(&mut self, handles: &[HiddenStateHandle], povm: &Povm) -> Result<usize> {
        let required = self.check_handles(handles)?;
        if povm.dim() != required {
            return Err(Error::DimMismatch { expected: required, found: povm.dim() });
        }
        let joint = tensor_all(handles.iter().map(|h| self.target.output(self.draws[h.id as usize])), self.dim_cap)?;
        self.finish(handles, &joint, povm)
    }

    fn measure_symmetric(&mut self, handles: &[HiddenStateHandle], povm: &Povm) -> Result<usize> {
        self.check_handles(handles)?;
        if self.target.out_dim() != 2 {
            return Err(Error::InvalidParams("symmetric measurements need qubit outputs".into()));
        }
        let joint = compressed_sample_state(&self.target, &input_groups(handles), self.dim_cap)?;
        if povm.dim() != joint.dim() {
            return Err(Error::DimMismatch { expected: joint.dim(), found: povm.dim() });
        }
        self.finish(handles, &joint, povm)
    }
}

impl SampleOracle {
    /// Validates ownership, freshness and the joint dimension; returns the joint dimension.
    fn check_handles(&self, handles: &[HiddenStateHandle]) -> Result<usize> {
        if handles.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = std::collections::HashSet::with_capacity(handles.len());
        for h in handles {
            if h.oracle != self.id || h.id as usize >= self.draws.len() {
                return Err(Error::ForeignHandle(h.id));
            }
            if self.consumed[h.id as usize] || !seen.insert(h.id) {
                return Err(Error::HandleConsumed(h.id));
            }
        }
        let required = handles
            .iter()
            .try_fold(1usize, |acc, h| acc.checked_mul(h.dim))
            .unwrap_or(usize::MAX);
        if required > self.dim_cap {
            return Err(Error::DimCapExceeded { required, cap: self.dim_cap });
        }
        Ok(required)
    }

    fn finish(&mut self, handles: &[HiddenStateHandle], joint: &DensityMatrix, povm: &Povm) -> Result<usize> {
        let outcome = sample_outcome(joint, povm, &mut self.rng)?;
        for h in handles {
            self.consumed[h.id as usize] = true;
        }
        self.measurements += 1;
        Ok(outcome)
    }
}
