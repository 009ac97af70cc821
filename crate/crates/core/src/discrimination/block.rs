use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qmath::{herm_eig, trace_norm_rect, ComplexMatrix, TOL_PSD};

/// For PSD `m` split after row/column `n1`, returns (‖M_{1,2}‖₂², ½‖(M²)_{1,2}‖₁), where
/// the first is the squared Frobenius norm of the top-right block and the second half the
/// trace norm of the same block of M². For PSD input the first never exceeds the second.
pub fn block_lemma_check(m: &ComplexMatrix, n1: usize) -> Result<(f64, f64)> {
    let n = m.dim();
    if n1 == 0 || n1 >= n {
        return Err(Error::InvalidParams(format!("split {n1} must lie in 1..{n}")));
    }
    let eig = herm_eig(m)?;
    let scale = eig.values.first().copied().unwrap_or(0.0).abs().max(1.0);
    let min_eig = eig.values.last().copied().unwrap_or(0.0);
    if min_eig < -TOL_PSD * scale {
        return Err(Error::NotPsd { min_eig });
    }
    let a = m.as_dmatrix();
    let lhs: f64 = a.view((0, n1), (n1, n - n1)).iter().map(|z| z.norm_sqr()).sum();
    let sq: DMatrix<_> = a * a;
    let rhs = 0.5 * trace_norm_rect(&sq.view((0, n1), (n1, n - n1)).into_owned());
    Ok((lhs, rhs))
}
