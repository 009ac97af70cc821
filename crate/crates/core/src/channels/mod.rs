//! Channel concepts, concept classes and the learner's sample oracle.

mod concept;
mod format;
mod oracle;

pub use concept::{
    concept_distance, distance_matrix, distance_matrix_of, set_fidelity, ChannelConcept, ConceptClass,
    DistanceMatrix, InputDistribution,
};
pub use format::{class_from_json, class_to_json};
pub use oracle::{compressed_sample_state, input_groups, HiddenStateHandle, SampleAccess, SampleOracle};
