//! Compressed form of permutation-invariant products of qubit states.
//!
//! ρ^{⊗m} on (C²)^{⊗m} decomposes as ⊕_l det(ρ)^l Sym^{m−2l}(ρ) ⊗ I_{μ(m,l)} with
//! μ(m,l) = C(m,l) − C(m,l−1). Dropping the multiplicity factors and weighting each block by
//! μ(m,l) gives a density matrix of dimension Σ_l (m−2l+1) with the same spectrum up to
//! multiplicities. Fidelities, trace distances and Born probabilities of measurements that are
//! block diagonal in this decomposition agree with those on the full space.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, DensityMatrix};

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multiplicity of the spin-(m/2 − l) irrep in (C²)^{⊗m}.
pub fn sym_multiplicity(m: usize, l: usize) -> f64 {
    if 2 * l > m {
        return 0.0;
    }
    binom(m, l) - if l == 0 { 0.0 } else { binom(m, l - 1) }
}

/// Dimension of the compressed form of an m-fold product.
pub fn compressed_dim(m: usize) -> usize {
    (0..=m / 2).map(|l| m - 2 * l + 1).sum()
}

/// Restriction of A^{⊗k} to the symmetric subspace, in the normalized Dicke basis ordered by
/// the number of |1⟩ factors.
pub fn sym_power(a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    if a.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: a.dim() });
    }
    let (a00, a01, a10, a11) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let pow = |z: Complex64, e: usize| z.powu(e as u32);
    let m = DMatrix::from_fn(k + 1, k + 1, |j, i| {
        let mut acc = Complex64::new(0.0, 0.0);
        // q positions carry |1⟩ on both sides
        for q in 0..=i.min(j) {
            if i - q > k - j || j - q > k - i {
                continue;
            }
            let count = binom(j, q) * binom(k - j, i - q);
            acc += pow(a11, q) * pow(a01, i - q) * pow(a10, j - q) * pow(a00, k + q - i - j) * count;
        }
        acc * (binom(k, j) / binom(k, i)).sqrt()
    });
    Ok(ComplexMatrix::from_raw(m))
}

/// Compressed form of ρ^{⊗m} for a qubit state ρ.
pub fn compress_power(rho: &DensityMatrix, m: usize) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::InvalidParams("power must be at least 1".into()));
    }
    let a = rho.matrix();
    if a.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: a.dim() });
    }
    let det = (a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0)).re.max(0.0);
    let n = compressed_dim(m);
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for l in 0..=m / 2 {
        let block = sym_power(a, m - 2 * l)?;
        let w = Complex64::new(sym_multiplicity(m, l) * det.powi(l as i32), 0.0);
        let d = block.dim();
        for i in 0..d {
            for j in 0..d {
                out[(offset + i, offset + j)] = block.get(i, j) * w;
            }
        }
        offset += d;
    }
    Ok(ComplexMatrix::from_raw(out))
}

/// Compressed form of ⊗_g ρ_g^{⊗m_g}: the Kronecker product of the per-group forms, in order.
pub fn compress_product(parts: &[(&DensityMatrix, usize)], dim_cap: usize) -> Result<DensityMatrix> {
    let required = parts.iter().try_fold(1usize, |acc, &(_, m)| acc.checked_mul(compressed_dim(m))).unwrap_or(usize::MAX);
    if parts.is_empty() {
        return Err(Error::EmptySet);
    }
    if required > dim_cap {
        return Err(Error::DimCapExceeded { required, cap: dim_cap });
    }
    let mut acc: Option<ComplexMatrix> = None;
    for &(rho, m) in parts {
        let g = compress_power(rho, m)?;
        acc = Some(match acc {
            None => g,
            Some(a) => a.kron(&g),
        });
    }
    Ok(DensityMatrix::from_trusted(acc.expect("non-empty").hermitian_part()))
}
