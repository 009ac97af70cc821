//! Complex Hermitian linear algebra and the quantum primitives built on it.

mod matrix;
mod measure;
mod spectral;
mod symmetric;

pub use matrix::{ComplexMatrix, DensityMatrix, ProbVector, TOL_PROB, TOL_TRACE};
pub use measure::{haar_basis, haar_unitary, outcome_distribution, sample_outcome, tv_distance, Povm};
pub use spectral::{
    fidelity, fidelity_of_sqrts, herm_eig, mat_func, psd_inv_sqrt_on_support, psd_sqrt, relative_support_cut,
    tensor_all, tensor_product, tensor_product_capped, trace_distance, trace_norm, trace_norm_rect, HermEig,
};
pub use symmetric::{compress_power, compress_product, compressed_dim, sym_multiplicity, sym_power};

/// Max entrywise |M - M^†| accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Most negative eigenvalue accepted as PSD.
pub const TOL_PSD: f64 = 1e-10;
/// Entrywise tolerance on Σ E_k = I.
pub const TOL_COMPLETE: f64 = 1e-8;
/// Default bound on the dimension of any tensor-product state.
pub const DIM_CAP: usize = 16384;
/// Inverse powers act on eigenvalues above this fraction of the largest one.
pub const SUPPORT_CUT_REL: f64 = 1e-12;
