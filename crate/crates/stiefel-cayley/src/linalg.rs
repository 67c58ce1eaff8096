//! Small dense linear-algebra helpers shared across modules.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest singular value; 0 for an empty matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Smallest singular value; errors on an empty matrix.
pub fn min_singular_value(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyBlock);
    }
    Ok(m.singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// Skew-symmetric part (X - X^T)/2.
pub fn skew_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Thin QR factor of an n x p matrix (n >= p) with the sign convention
/// diag(R) > 0, which makes the factor unique and deterministic.
///
/// Errors with `RankDeficient` when some |r_jj| falls below `diag_tol`.
pub fn thin_qr_positive(m: &DMatrix<f64>, diag_tol: f64) -> Result<DMatrix<f64>> {
    let p = m.ncols();
    let (mut q, r) = m.clone().qr().unpack();
    for j in 0..p {
        let d = r[(j, j)];
        if d.abs() < diag_tol {
            return Err(Error::RankDeficient { index: j, diag: d });
        }
        if d < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Eigenvalues of a symmetric matrix, sorted in descending order.
pub fn symmetric_eigenvalues_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}
