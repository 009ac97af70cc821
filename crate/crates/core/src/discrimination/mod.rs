//! Pretty good measurements, Helstrom tests and the bichromatic discrimination solver.

mod binary;
mod block;
mod bsd;
mod pgm;

pub use binary::{helstrom_binary, BinaryMeasurement};
pub use block::block_lemma_check;
pub use bsd::{
    bsd_error_bound, grouped_pgm_binary, minimax_bsd, minimax_regret, minimax_step, BsdInstance,
};
pub use pgm::{pgm_build, pgm_confusion, WeightedStateSet};
