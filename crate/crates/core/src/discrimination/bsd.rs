//! Bichromatic state discrimination: decide whether an unknown state came from the "yes" set or
//! the "no" set when every cross pair has fidelity at most η.

use crate::channels::set_fidelity;
use crate::error::{Error, Result};
use crate::qmath::{fidelity_of_sqrts, psd_sqrt, ComplexMatrix, DensityMatrix, ProbVector};

use super::binary::{helstrom_binary, BinaryMeasurement};
use super::pgm::{pgm_build, WeightedStateSet};

/// Slack on the η promise when validating an instance.
const PROMISE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BsdInstance {
    yes_states: Vec<DensityMatrix>,
    no_states: Vec<DensityMatrix>,
    eta: f64,
    cap_n: usize,
}

impl BsdInstance {
    /// Validates both sides non-empty, sizes ≤ `cap_n`, and max cross fidelity ≤ `eta`.
    pub fn new(yes_states: Vec<DensityMatrix>, no_states: Vec<DensityMatrix>, eta: f64, cap_n: usize) -> Result<Self> {
        if yes_states.is_empty() || no_states.is_empty() {
            return Err(Error::EmptySet);
        }
        if yes_states.len() > cap_n || no_states.len() > cap_n {
            return Err(Error::PromiseViolated(format!(
                "set sizes {} and {} exceed N = {cap_n}",
                yes_states.len(),
                no_states.len()
            )));
        }
        let measured = set_fidelity(&yes_states, &no_states)?;
        if measured > eta + PROMISE_TOL {
            return Err(Error::PromiseViolated(format!("cross fidelity {measured} exceeds eta = {eta}")));
        }
        Ok(Self { yes_states, no_states, eta, cap_n })
    }

    /// Instance whose promise is the tightest one the sets satisfy.
    pub fn from_sets(yes_states: Vec<DensityMatrix>, no_states: Vec<DensityMatrix>) -> Result<Self> {
        if yes_states.is_empty() || no_states.is_empty() {
            return Err(Error::EmptySet);
        }
        let eta = set_fidelity(&yes_states, &no_states)?;
        let cap_n = yes_states.len().max(no_states.len());
        Ok(Self { yes_states, no_states, eta, cap_n })
    }

    pub fn yes_states(&self) -> &[DensityMatrix] {
        &self.yes_states
    }

    pub fn no_states(&self) -> &[DensityMatrix] {
        &self.no_states
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cap_n(&self) -> usize {
        self.cap_n
    }

    pub fn dim(&self) -> usize {
        self.yes_states[0].dim()
    }

    /// Number of states across both sides.
    pub fn len(&self) -> usize {
        self.yes_states.len() + self.no_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All states, yes side first.
    pub fn all_states(&self) -> impl Iterator<Item = &DensityMatrix> {
        self.yes_states.iter().chain(&self.no_states)
    }

    /// Per-state error: Pr(no | σ) for yes states followed by Pr(yes | σ) for no states.
    pub fn errors(&self, m: &BinaryMeasurement) -> Vec<f64> {
        self.yes_states
            .iter()
            .map(|s| m.prob_no(s))
            .chain(self.no_states.iter().map(|s| m.prob_yes(s)))
            .collect()
    }

    pub fn worst_case_error(&self, m: &BinaryMeasurement) -> f64 {
        self.errors(m).into_iter().fold(0.0, f64::max)
    }

    /// Σ_i p_i · error_i for priors over yes ++ no.
    pub fn average_error(&self, m: &BinaryMeasurement, priors: &ProbVector) -> Result<f64> {
        if priors.len() != self.len() {
            return Err(Error::LengthMismatch { left: priors.len(), right: self.len() });
        }
        Ok(self.errors(m).iter().zip(priors.as_slice()).map(|(e, p)| e * p).sum())
    }

    /// Prior-weighted sums (A_yes, A_no).
    pub fn weighted_operators(&self, priors: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let dim = self.dim();
        let split = self.yes_states.len();
        let mut a_yes = ComplexMatrix::zeros(dim);
        let mut a_no = ComplexMatrix::zeros(dim);
        for (i, (s, &p)) in self.all_states().zip(priors).enumerate() {
            if p == 0.0 {
                continue;
            }
            let term = s.matrix().scale(p);
            if i < split {
                a_yes = &a_yes + &term;
            } else {
                a_no = &a_no + &term;
            }
        }
        (a_yes, a_no)
    }
}

/// Groups the PGM of yes ++ no (with the given priors) into {Σ_yes E_i, Σ_no E_i}.
pub fn grouped_pgm_binary(inst: &BsdInstance, priors: &ProbVector) -> Result<BinaryMeasurement> {
    if priors.len() != inst.len() {
        return Err(Error::LengthMismatch { left: priors.len(), right: inst.len() });
    }
    let set = WeightedStateSet::new(inst.all_states().cloned().collect(), priors.clone())?;
    let pgm = pgm_build(&set)?;
    let dim = inst.dim();
    let split = inst.yes_states.len();
    let e_yes = pgm.effects()[..split].iter().fold(ComplexMatrix::zeros(dim), |acc, e| &acc + e);
    let e_no = pgm.effects()[split..].iter().fold(ComplexMatrix::zeros(dim), |acc, e| &acc + e);
    BinaryMeasurement::new(e_yes.hermitian_part(), e_no.hermitian_part())
}

/// Σ_{i ∈ yes} Σ_{j ∈ no} F(σ_i, σ_j).
pub fn bsd_error_bound(inst: &BsdInstance) -> Result<f64> {
    let roots_no = inst.no_states.iter().map(|b| psd_sqrt(b.matrix())).collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for a in &inst.yes_states {
        let sqrt_a = psd_sqrt(a.matrix())?;
        for sqrt_b in &roots_no {
            total += fidelity_of_sqrts(&sqrt_a, sqrt_b);
        }
    }
    Ok(total)
}

/// √(ln(2N) / rounds), the error slack allowed on top of the game value.
pub fn minimax_regret(cap_n: usize, rounds: usize) -> f64 {
    ((2.0 * cap_n.max(1) as f64).ln() / rounds.max(1) as f64).sqrt()
}

/// Hedge learning rate √(8 ln K / rounds), capped at 1, for K pure strategies.
pub fn minimax_step(strategies: usize, rounds: usize) -> f64 {
    let k = strategies.max(2) as f64;
    (8.0 * k.ln() / rounds.max(1) as f64).sqrt().min(1.0)
}

/// Approximate minimax measurement for a BSD instance.
///
/// The prior player runs Hedge over the states (gain = error probability); the measurement
/// player best-responds with the Helstrom test of the current priors. The round-averaged
/// measurement has worst-case error at most the game value plus the Hedge regret
/// ln K / (step·rounds) + step/8.
pub fn minimax_bsd(inst: &BsdInstance, rounds: usize, step: f64) -> Result<BinaryMeasurement> {
    if rounds < 1 {
        return Err(Error::InvalidConfig("minimax rounds must be at least 1".into()));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!("minimax step {step} outside (0, 1]")));
    }
    let k = inst.len();
    let mut cumulative = vec![0.0f64; k];
    let mut yes_sum = ComplexMatrix::zeros(inst.dim());
    for _ in 0..rounds {
        let top = cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = cumulative.iter().map(|g| (step * (g - top)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let priors: Vec<f64> = weights.iter().map(|w| w / z).collect();

        let (a_yes, a_no) = inst.weighted_operators(&priors);
        let response = helstrom_binary(&a_yes, &a_no)?;
        for (c, e) in cumulative.iter_mut().zip(inst.errors(&response)) {
            *c += e;
        }
        yes_sum = &yes_sum + response.e_yes();
    }
    Ok(BinaryMeasurement::from_yes_effect(yes_sum.scale(1.0 / rounds as f64).hermitian_part()))
}
