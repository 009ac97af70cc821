use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, DensityMatrix, ProbVector, TOL_PROB};
use super::spectral::herm_eig;
use super::{TOL_COMPLETE, TOL_HERM, TOL_PSD};

/// Finite list of PSD effects summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = effects.first().ok_or(Error::EmptySet)?.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: e.dim() });
            }
            let max_dev = e.hermitian_deviation();
            if max_dev > TOL_HERM {
                return Err(Error::NotHermitian { max_dev });
            }
            let min_eig = herm_eig(e)?.values.last().copied().unwrap_or(0.0);
            if min_eig < -TOL_PSD {
                return Err(Error::NotPsd { min_eig });
            }
            total = &total + e;
        }
        let max_dev = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if max_dev > TOL_COMPLETE {
            return Err(Error::IncompletePovm { max_dev });
        }
        Ok(Self { dim, effects })
    }

    pub(crate) fn from_trusted(effects: Vec<ComplexMatrix>) -> Self {
        let dim = effects[0].dim();
        Self { dim, effects }
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self::from_trusted((0..dim).map(|k| DensityMatrix::basis(dim, k).matrix().clone()).collect())
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Self {
        let m = u.as_dmatrix();
        let effects = (0..m.ncols())
            .map(|k| {
                let col: Vec<Complex64> = m.column(k).iter().copied().collect();
                ComplexMatrix::outer(&col)
            })
            .collect();
        Self::from_trusted(effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Re tr(E_k ρ) without normalization or clipping.
    pub fn raw_probability(&self, k: usize, rho: &DensityMatrix) -> f64 {
        self.effects[k].trace_product(rho.matrix()).re
    }
}

/// Haar-distributed unitary: complex Gaussian matrix orthonormalized column by column, which
/// is the QR factorization whose triangular factor has a real positive diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for k in 0..dim {
        // two passes of modified Gram-Schmidt keep the basis orthonormal to machine precision
        for _ in 0..2 {
            for j in 0..k {
                let (done, rest) = cols.split_at_mut(k);
                let q = &done[j];
                let v = &mut rest[0];
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[k].iter_mut() {
            *z /= norm;
        }
    }
    ComplexMatrix::from_raw(nalgebra::DMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}

/// Measurement in a Haar-random orthonormal basis.
pub fn haar_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Povm {
    Povm::from_unitary_columns(&haar_unitary(dim, rng))
}

/// Born-rule distribution of `povm` on `rho`; negative round-off is clipped and the result
/// renormalized, but only when the total is within 1e-9 of one.
pub fn outcome_distribution(rho: &DensityMatrix, povm: &Povm) -> Result<ProbVector> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimMismatch { expected: povm.dim(), found: rho.dim() });
    }
    let probs: Vec<f64> = (0..povm.len()).map(|k| povm.raw_probability(k, rho).max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let drift = (total - 1.0).abs();
    if drift > TOL_PROB {
        return Err(Error::ProbabilityDrift { drift });
    }
    ProbVector::normalized(probs)
}

pub fn sample_outcome<R: Rng + ?Sized>(rho: &DensityMatrix, povm: &Povm, rng: &mut R) -> Result<usize> {
    let dist = outcome_distribution(rho, povm)?;
    Ok(dist.sample_with(rng.random::<f64>()))
}

/// ½‖p − q‖₁.
pub fn tv_distance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    let l1: f64 = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * l1).clamp(0.0, 1.0))
}
