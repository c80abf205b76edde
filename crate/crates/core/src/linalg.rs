//! Small dense helpers for local matrices.

use nalgebra::{DMatrix, Matrix3};

use crate::mesh::Point3;

/// Stacks vectors as the rows of an `m`x3 matrix.
pub fn rows_to_matrix(rows: &[Point3]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j])
}

/// Orthonormal basis of the orthogonal complement of the column space of
/// `q` (`m`x3), as the last `m - 3` columns of a full Householder QR.
///
/// Returns `None` when `q` has numerical rank below 3.
pub fn complement_basis(q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let m = q.nrows();
    let k = q.ncols();
    if m < k {
        return None;
    }
    let mut aug = DMatrix::zeros(m, k + m);
    aug.view_mut((0, 0), (m, k)).copy_from(q);
    aug.view_mut((0, k), (m, m)).fill_with_identity();
    let qr = aug.qr();
    let r = qr.r();
    let scale = q.norm().max(f64::MIN_POSITIVE);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * scale) {
        return None;
    }
    let full = qr.q();
    Some(full.columns(k, m - k).into_owned())
}

/// Copies the upper triangle onto the lower one so the result is
/// symmetric bit for bit.
pub fn mirror_upper(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
}

/// Inverse of an SPD matrix through its Cholesky factor, mirrored to exact
/// symmetry. `None` if the factorization fails.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut inv = m.clone().cholesky()?.inverse();
    mirror_upper(&mut inv);
    Some(inv)
}

pub fn is_spd(m: &DMatrix<f64>) -> bool {
    m.clone().cholesky().is_some()
}

/// Inverse of a symmetric 3x3 matrix, mirrored to exact symmetry.
pub fn symmetric_inverse3(k: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let mut inv = k.try_inverse()?;
    for i in 0..3 {
        for j in 0..i {
            inv[(i, j)] = inv[(j, i)];
        }
    }
    Some(inv)
}
