use crate::error::{Error, Result};
use crate::qmath::{outcome_distribution, psd_inv_sqrt_on_support, ComplexMatrix, DensityMatrix, Povm, ProbVector};

/// States σ_i with priors p_i.
#[derive(Clone, Debug)]
pub struct WeightedStateSet {
    states: Vec<DensityMatrix>,
    priors: ProbVector,
}

impl WeightedStateSet {
    pub fn new(states: Vec<DensityMatrix>, priors: ProbVector) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptySet);
        }
        if states.len() != priors.len() {
            return Err(Error::LengthMismatch { left: states.len(), right: priors.len() });
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { states, priors })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(states, ProbVector::uniform(n))
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn priors(&self) -> &ProbVector {
        &self.priors
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Pretty good measurement E_i = A^{-1/2} p_i σ_i A^{-1/2} with A = Σ p_i σ_i.
///
/// The effects sum to the support projector of A; the complement (I minus that sum) is added to
/// effect 0 so the result is a complete measurement. No state in the set has weight off the
/// support, so outcome statistics on the set are unchanged.
pub fn pgm_build(set: &WeightedStateSet) -> Result<Povm> {
    let dim = set.dim();
    let weighted: Vec<ComplexMatrix> =
        set.states.iter().zip(set.priors.as_slice()).map(|(s, &p)| s.matrix().scale(p)).collect();
    let total = weighted.iter().fold(ComplexMatrix::zeros(dim), |acc, a| &acc + a);
    let (inv_sqrt, _support) = psd_inv_sqrt_on_support(&total)?;

    let mut effects: Vec<ComplexMatrix> =
        weighted.iter().map(|a| (&(&inv_sqrt * a) * &inv_sqrt).hermitian_part()).collect();
    let sum = effects.iter().fold(ComplexMatrix::zeros(dim), |acc, e| &acc + e);
    let residual = &ComplexMatrix::identity(dim) - &sum;
    effects[0] = (&effects[0] + &residual).hermitian_part();
    Povm::new(effects)
}

/// Entry (k, i) is Pr(PGM(σ_k) = i).
pub fn pgm_confusion(set: &WeightedStateSet) -> Result<Vec<Vec<f64>>> {
    let pgm = pgm_build(set)?;
    set.states
        .iter()
        .map(|s| outcome_distribution(s, &pgm).map(|p| p.as_slice().to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn orthogonal_states_give_projectors() {
        let set = WeightedStateSet::uniform(vec![DensityMatrix::basis(3, 0), DensityMatrix::basis(3, 2)]).unwrap();
        let pgm = pgm_build(&set).unwrap();
        // effect 0 also carries the off-support direction |1><1|
        let e0 = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        let e1 = ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]);
        assert!(pgm.effects()[0].max_abs_diff(&e0) < 1e-12);
        assert!(pgm.effects()[1].max_abs_diff(&e1) < 1e-12);
        let conf = pgm_confusion(&set).unwrap();
        assert!((conf[0][0] - 1.0).abs() < 1e-12 && (conf[1][1] - 1.0).abs() < 1e-12);
        assert!(conf[0][1].abs() < 1e-12 && conf[1][0].abs() < 1e-12);
    }

    #[test]
    fn single_state_effect_is_identity() {
        let set = WeightedStateSet::uniform(vec![DensityMatrix::basis(2, 1)]).unwrap();
        let pgm = pgm_build(&set).unwrap();
        assert!(pgm.effects()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert_eq!(pgm_confusion(&set).unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn zero_plus_matches_closed_form() {
        // two pure states with overlap 1/sqrt(2): success (1 + sqrt(1 - 1/2)) / 2
        let expected = (1.0 + (0.5f64).sqrt()) / 2.0;
        let set = WeightedStateSet::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap();
        let conf = pgm_confusion(&set).unwrap();
        assert!((expected - 0.853_55).abs() < 1e-5);
        for k in 0..2 {
            assert!((conf[k][k] - expected).abs() < 1e-10, "{conf:?}");
            assert!((conf[k][1 - k] - (1.0 - expected)).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let err = WeightedStateSet::new(vec![DensityMatrix::basis(2, 0)], ProbVector::uniform(2)).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }
}
