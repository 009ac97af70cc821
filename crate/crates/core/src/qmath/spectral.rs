//! Spectral routines on Hermitian matrices and the distance measures built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, DensityMatrix};
use super::{DIM_CAP, SUPPORT_CUT_REL, TOL_HERM, TOL_PSD};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
    /// Invariant blocks as (rows, eigen-columns) when the matrix is block diagonal up to
    /// permutation; empty for a single dense block.
    blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

impl HermEig {
    /// V diag(g(λ)) V^†.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.as_dmatrix();
        if !self.blocks.is_empty() {
            let n = v.nrows();
            let mut out = DMatrix::zeros(n, n);
            for (rows, cols) in &self.blocks {
                let vb = DMatrix::from_fn(rows.len(), cols.len(), |i, j| v[(rows[i], cols[j])]);
                let mut scaled = vb.clone();
                for (k, &c) in cols.iter().enumerate() {
                    let w = Complex64::new(g(self.values[c]), 0.0);
                    scaled.column_mut(k).iter_mut().for_each(|z| *z *= w);
                }
                let part = scaled * vb.adjoint();
                for (i, &r) in rows.iter().enumerate() {
                    for (j, &c) in rows.iter().enumerate() {
                        out[(r, c)] = part[(i, j)];
                    }
                }
            }
            return ComplexMatrix::from_raw(out);
        }
        let mut scaled = v.clone();
        for (k, &l) in self.values.iter().enumerate() {
            let w = Complex64::new(g(l), 0.0);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= w);
        }
        ComplexMatrix::from_raw(scaled * v.adjoint())
    }
}

pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    let max_dev = h.hermitian_deviation();
    if max_dev > TOL_HERM {
        return Err(Error::NotHermitian { max_dev });
    }
    Ok(herm_eig_unchecked(h))
}

/// Connected components of the joint nonzero pattern of square matrices, each sorted.
pub(crate) fn block_components(mats: &[&DMatrix<Complex64>]) -> Vec<Vec<usize>> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in mats {
        for j in 0..n {
            for i in 0..n {
                if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn sub_block(m: &DMatrix<Complex64>, rows: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| m[(rows[i], rows[j])])
}

fn herm_eig_unchecked(h: &ComplexMatrix) -> HermEig {
    let h = h.hermitian_part().into_dmatrix();
    let n = h.nrows();
    let comps = if n > 8 { block_components(&[&h]) } else { vec![(0..n).collect()] };
    // (value, row indices, local eigenvector)
    let mut pairs: Vec<(f64, usize, Vec<Complex64>)> = Vec::with_capacity(n);
    for (b, rows) in comps.iter().enumerate() {
        let eig = if comps.len() == 1 { h.clone() } else { sub_block(&h, rows) }.symmetric_eigen();
        for k in 0..rows.len() {
            pairs.push((eig.eigenvalues[k], b, eig.eigenvectors.column(k).iter().copied().collect()));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut vectors = DMatrix::zeros(n, n);
    let mut cols = vec![Vec::new(); comps.len()];
    for (j, (_, b, v)) in pairs.iter().enumerate() {
        for (i, &r) in comps[*b].iter().enumerate() {
            vectors[(r, j)] = v[i];
        }
        cols[*b].push(j);
    }
    let values = pairs.iter().map(|p| p.0).collect();
    let blocks = if comps.len() > 1 { comps.into_iter().zip(cols).collect() } else { Vec::new() };
    HermEig { values, vectors: ComplexMatrix::from_raw(vectors), blocks }
}

/// Sum of singular values of a square matrix, block by block when it decomposes.
fn singular_value_sum(m: &DMatrix<Complex64>) -> f64 {
    let comps = if m.nrows() > 8 { block_components(&[m]) } else { vec![(0..m.nrows()).collect()] };
    if comps.len() <= 1 {
        return m.singular_values().sum();
    }
    comps.iter().map(|rows| sub_block(m, rows).singular_values().sum()).sum::<f64>()
}

/// Applies `f` to the spectrum of `h` on eigenvalues above `support_cut`; everything else maps
/// to zero. Eigenvalues in [-TOL_PSD, 0) are clipped to zero first.
pub fn mat_func(h: &ComplexMatrix, f: impl Fn(f64) -> f64, support_cut: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.reconstruct_with(|l| {
        let l = clip_psd(l);
        if l > support_cut {
            f(l)
        } else {
            0.0
        }
    }))
}

fn clip_psd(l: f64) -> f64 {
    if (-TOL_PSD..0.0).contains(&l) {
        0.0
    } else {
        l
    }
}

/// Support threshold relative to the largest eigenvalue.
pub fn relative_support_cut(eig: &HermEig) -> f64 {
    SUPPORT_CUT_REL * eig.values.first().copied().unwrap_or(0.0).max(0.0)
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let cut = relative_support_cut(&eig);
    Ok(eig.reconstruct_with(|l| {
        let l = clip_psd(l);
        if l > cut {
            l.sqrt()
        } else {
            0.0
        }
    }))
}

/// A^{-1/2} restricted to the support of A, together with the support projector.
pub fn psd_inv_sqrt_on_support(h: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = herm_eig(h)?;
    let cut = relative_support_cut(&eig);
    let inv = eig.reconstruct_with(|l| if clip_psd(l) > cut { 1.0 / l.sqrt() } else { 0.0 });
    let proj = eig.reconstruct_with(|l| if clip_psd(l) > cut { 1.0 } else { 0.0 });
    Ok((inv, proj))
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    if a.is_hermitian() {
        return herm_eig_unchecked(a).values.iter().map(|l| l.abs()).sum();
    }
    singular_value_sum(a.as_dmatrix())
}

/// Trace norm of a rectangular block.
pub fn trace_norm_rect(block: &DMatrix<Complex64>) -> f64 {
    if block.nrows() == 0 || block.ncols() == 0 {
        return 0.0;
    }
    block.singular_values().sum()
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// ½‖ρ1 − ρ2‖₁.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1, rho2)?;
    let diff = rho1.matrix() - rho2.matrix();
    let eig = herm_eig_unchecked(&diff);
    Ok((0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// ‖√ρ1 √ρ2‖₁, the sum of singular values of the product of square roots.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1, rho2)?;
    Ok(fidelity_of_sqrts(&psd_sqrt(rho1.matrix())?, &psd_sqrt(rho2.matrix())?))
}

/// Fidelity from precomputed square roots √ρ1, √ρ2.
pub fn fidelity_of_sqrts(sqrt_rho1: &ComplexMatrix, sqrt_rho2: &ComplexMatrix) -> f64 {
    let (a, b) = (sqrt_rho1.as_dmatrix(), sqrt_rho2.as_dmatrix());
    let comps = if a.nrows() > 8 { block_components(&[a, b]) } else { vec![(0..a.nrows()).collect()] };
    let total: f64 = if comps.len() <= 1 {
        (a * b).singular_values().sum()
    } else {
        comps.iter().map(|rows| (sub_block(a, rows) * sub_block(b, rows)).singular_values().sum()).sum::<f64>()
    };
    total.clamp(0.0, 1.0)
}

/// ρ1 ⊗ ρ2, refusing products above `dim_cap`.
pub fn tensor_product_capped(rho1: &DensityMatrix, rho2: &DensityMatrix, dim_cap: usize) -> Result<DensityMatrix> {
    let required = rho1.dim().saturating_mul(rho2.dim());
    if required > dim_cap {
        return Err(Error::DimCapExceeded { required, cap: dim_cap });
    }
    Ok(DensityMatrix::from_trusted(rho1.matrix().kron(rho2.matrix())))
}

pub fn tensor_product(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_product_capped(rho1, rho2, DIM_CAP)
}

/// Left-to-right tensor product of a non-empty list of states.
pub fn tensor_all<'a, I>(states: I, dim_cap: usize) -> Result<DensityMatrix>
where
    I: IntoIterator<Item = &'a DensityMatrix>,
{
    let mut iter = states.into_iter();
    let first = iter.next().ok_or(Error::EmptySet)?.clone();
    iter.try_fold(first, |acc, s| tensor_product_capped(&acc, s, dim_cap))
}
