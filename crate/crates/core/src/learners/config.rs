use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::DIM_CAP;

/// Multipliers fixed by `qpac calibrate`, shipped with the crate.
pub const DEFAULTS_TOML: &str = include_str!("../../calibration.toml");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub k_pure: f64,
    pub k_mixed: f64,
}

impl Calibration {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cal: Calibration = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if !(cal.k_pure > 0.0 && cal.k_mixed > 0.0) {
            return Err(Error::InvalidConfig("calibrated multipliers must be positive".into()));
        }
        Ok(cal)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn shipped() -> Self {
        Self::from_toml(DEFAULTS_TOML).expect("shipped calibration file is valid")
    }

    pub fn to_toml(&self) -> String {
        format!(
            "# Sample-count multipliers chosen by `qpac calibrate`.\n\
             # Pure learner:  T = ceil(k_pure * (log2|C| + log2(1/delta)) / eps^2)\n\
             # Mixed learner: T = ceil(k_mixed * log2(|C|)^2 * (log2|C| + log2(1/delta)) / eps^2) per loop\n\
             k_pure = {:?}\nk_mixed = {:?}\n",
            self.k_pure, self.k_mixed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub k_pure: f64,
    pub k_mixed: f64,
    /// γ = ε / (gamma_divisor · max(1, log₂|C_r|)) in the partition routine.
    pub gamma_divisor: f64,
    /// Largest joint dimension the mixed learner may measure.
    pub dim_cap: usize,
    /// Optional ceiling on the mixed learner's per-loop sample count.
    pub max_loop_samples: Option<usize>,
    /// Multiplicative-weights rounds for the BSD measurement.
    pub bsd_rounds: usize,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        let cal = Calibration::shipped();
        Self {
            epsilon: 0.2,
            delta: 0.1,
            k_pure: cal.k_pure,
            k_mixed: cal.k_mixed,
            gamma_divisor: 4.0,
            dim_cap: DIM_CAP,
            max_loop_samples: None,
            bsd_rounds: 50,
        }
    }
}

impl LearnerConfig {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let cfg = Self { epsilon, delta, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_calibration(mut self, cal: Calibration) -> Self {
        self.k_pure = cal.k_pure;
        self.k_mixed = cal.k_mixed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("epsilon {} outside (0, 1]", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} outside (0, 1)", self.delta));
        }
        if !(self.k_pure > 0.0 && self.k_pure.is_finite() && self.k_mixed > 0.0 && self.k_mixed.is_finite()) {
            return bad("sample multipliers must be positive".into());
        }
        // below 2 the partition's bin search can run past epsilon for tiny classes
        if !(self.gamma_divisor >= 2.0 && self.gamma_divisor.is_finite()) {
            return bad(format!("gamma_divisor {} must be at least 2", self.gamma_divisor));
        }
        if self.dim_cap < 1 {
            return bad("dim_cap must be positive".into());
        }
        if self.max_loop_samples == Some(0) {
            return bad("max_loop_samples must be positive".into());
        }
        if self.bsd_rounds < 1 {
            return bad("bsd_rounds must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Pure,
    Mixed,
}

/// Samples the learner draws: the whole budget for the pure learner, the per-loop budget for
/// the mixed learner.
pub fn choose_sample_count(kind: SampleKind, class_size: usize, cfg: &LearnerConfig) -> usize {
    let log_c = (class_size.max(1) as f64).log2();
    let log_delta = (1.0 / cfg.delta).log2();
    let eps2 = cfg.epsilon * cfg.epsilon;
    let raw = match kind {
        SampleKind::Pure => cfg.k_pure * (log_c + log_delta) / eps2,
        SampleKind::Mixed => cfg.k_mixed * log_c * log_c * (log_c + log_delta) / eps2,
    };
    // guard against 8.000000000000002 style round-up of exact products
    let rounded = (raw - 1e-9).ceil();
    (rounded.max(1.0)) as usize
}
