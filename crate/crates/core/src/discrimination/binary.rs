use crate::error::{Error, Result};
use crate::qmath::{herm_eig, ComplexMatrix, DensityMatrix, Povm, TOL_COMPLETE, TOL_PSD};

/// Eigenvalues of a_yes − a_no at or below this go to the "no" effect.
const TIE_TOL: f64 = 1e-14;

/// Two-outcome measurement {E_yes, E_no}.
#[derive(Clone, Debug)]
pub struct BinaryMeasurement {
    e_yes: ComplexMatrix,
    e_no: ComplexMatrix,
}

impl BinaryMeasurement {
    pub fn new(e_yes: ComplexMatrix, e_no: ComplexMatrix) -> Result<Self> {
        if e_yes.dim() != e_no.dim() {
            return Err(Error::DimMismatch { expected: e_yes.dim(), found: e_no.dim() });
        }
        for e in [&e_yes, &e_no] {
            let min_eig = herm_eig(e)?.values.last().copied().unwrap_or(0.0);
            if min_eig < -TOL_PSD {
                return Err(Error::NotPsd { min_eig });
            }
        }
        let max_dev = (&e_yes + &e_no).max_abs_diff(&ComplexMatrix::identity(e_yes.dim()));
        if max_dev > TOL_COMPLETE {
            return Err(Error::IncompletePovm { max_dev });
        }
        Ok(Self { e_yes, e_no })
    }

    /// e_no = I − e_yes for a projector or average of projectors.
    pub(crate) fn from_yes_effect(e_yes: ComplexMatrix) -> Self {
        let e_no = &ComplexMatrix::identity(e_yes.dim()) - &e_yes;
        Self { e_yes, e_no }
    }

    pub fn e_yes(&self) -> &ComplexMatrix {
        &self.e_yes
    }

    pub fn e_no(&self) -> &ComplexMatrix {
        &self.e_no
    }

    pub fn dim(&self) -> usize {
        self.e_yes.dim()
    }

    pub fn prob_yes(&self, rho: &DensityMatrix) -> f64 {
        self.e_yes.trace_product(rho.matrix()).re.clamp(0.0, 1.0)
    }

    pub fn prob_no(&self, rho: &DensityMatrix) -> f64 {
        self.e_no.trace_product(rho.matrix()).re.clamp(0.0, 1.0)
    }

    /// Outcome 0 is "yes", outcome 1 is "no".
    pub fn to_povm(&self) -> Povm {
        Povm::from_trusted(vec![self.e_yes.clone(), self.e_no.clone()])
    }

    /// tr(E_no A_yes) + tr(E_yes A_no) for prior-weighted (unnormalized) operators.
    pub fn weighted_error(&self, a_yes: &ComplexMatrix, a_no: &ComplexMatrix) -> f64 {
        self.e_no.trace_product(a_yes).re + self.e_yes.trace_product(a_no).re
    }

    /// Uniform average of measurements of equal dimension.
    pub fn average(items: &[BinaryMeasurement]) -> Result<Self> {
        let first = items.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for m in items {
            if m.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: m.dim() });
            }
            sum = &sum + &m.e_yes;
        }
        Ok(Self::from_yes_effect(sum.scale(1.0 / items.len() as f64)))
    }
}

/// Optimal binary test between two prior-weighted operators: projector onto the positive
/// eigenspace of a_yes − a_no. Zero eigenvalues go to the "no" effect.
pub fn helstrom_binary(a_yes: &ComplexMatrix, a_no: &ComplexMatrix) -> Result<BinaryMeasurement> {
    if a_yes.dim() != a_no.dim() {
        return Err(Error::DimMismatch { expected: a_yes.dim(), found: a_no.dim() });
    }
    for a in [a_yes, a_no] {
        if !a.is_hermitian() {
            return Err(Error::NotHermitian { max_dev: a.hermitian_deviation() });
        }
    }
    let eig = herm_eig(&(a_yes - a_no))?;
    let e_yes = eig.reconstruct_with(|l| if l > TIE_TOL { 1.0 } else { 0.0 });
    Ok(BinaryMeasurement::from_yes_effect(e_yes.hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::trace_distance;
    use num_complex::Complex64;

    #[test]
    fn orthogonal_halves() {
        let a_yes = DensityMatrix::basis(2, 0).matrix().scale(0.5);
        let a_no = DensityMatrix::basis(2, 1).matrix().scale(0.5);
        let m = helstrom_binary(&a_yes, &a_no).unwrap();
        assert!(m.e_yes().max_abs_diff(DensityMatrix::basis(2, 0).matrix()) < 1e-14);
        assert!(m.weighted_error(&a_yes, &a_no).abs() < 1e-14);
    }

    #[test]
    fn ties_go_to_no() {
        let a = DensityMatrix::maximally_mixed(3).matrix().scale(0.5);
        let m = helstrom_binary(&a, &a).unwrap();
        assert!(m.e_yes().max_abs_diff(&ComplexMatrix::zeros(3)) < 1e-15);
        assert!(m.e_no().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn equal_priors_error_matches_trace_distance() {
        let s = DensityMatrix::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let t = DensityMatrix::maximally_mixed(2);
        let m = helstrom_binary(&s.matrix().scale(0.5), &t.matrix().scale(0.5)).unwrap();
        let err = 0.5 * m.prob_no(&s) + 0.5 * m.prob_yes(&t);
        let expected = 0.5 * (1.0 - trace_distance(&s, &t).unwrap());
        assert!((err - expected).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(BinaryMeasurement::new(half.clone(), half.clone()).is_ok());
        assert!(matches!(BinaryMeasurement::new(half.clone(), half.scale(0.5)), Err(Error::IncompletePovm { .. })));
        let neg = ComplexMatrix::from_real_diagonal(&[1.5, 0.5]);
        let comp = ComplexMatrix::from_real_diagonal(&[-0.5, 0.5]);
        assert!(matches!(BinaryMeasurement::new(neg, comp), Err(Error::NotPsd { .. })));
    }
}
