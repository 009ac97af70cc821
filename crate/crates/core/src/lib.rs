//! PAC learning of quantum channels from sample access.
//!
//! The crate is layered bottom-up:
//!
//! - [`qmath`]: dense complex matrices, density matrices, POVMs, fidelity and trace distance.
//! - [`channels`]: channel concepts as output tables, concept classes, and the sample oracle
//!   that hands learners measurement-only access to copies of the target's outputs.
//! - [`discrimination`]: pretty good measurements, Helstrom tests, and a multiplicative-weights
//!   solver for bichromatic state discrimination.
//! - [`learners`]: the pure-output learner (random orthonormal measurements plus maximum
//!   likelihood), the partition routine, the mixed-output learner, and approximate state
//!   discrimination on top of them.
//! - [`harness`]: generators, seeded Monte-Carlo experiments, calibration, and verification
//!   suites used by the `qpac` binary.

pub mod channels;
pub mod discrimination;
pub mod error;
pub mod harness;
pub mod learners;
pub mod qmath;

pub use error::{Error, Result};
