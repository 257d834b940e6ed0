//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Condition numbers at or above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Singular values in descending order. Empty for matrices with a zero dimension.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// 2-norm condition number; `1.0` for the empty matrix, `inf` for exactly singular ones.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) => {
            if min == 0.0 {
                f64::INFINITY
            } else {
                max / min
            }
        }
        _ => 1.0,
    }
}

/// Solves `m x = rhs`, failing when `m` is numerically singular.
pub fn solve(m: &CMatrix, rhs: &CMatrix, name: &'static str) -> crate::Result<CMatrix> {
    let condition = condition_number(m);
    if !(condition < CONDITION_LIMIT) {
        return Err(crate::Error::SingularMatrix { name, condition });
    }
    if m.nrows() == 0 {
        return Ok(CMatrix::zeros(0, rhs.ncols()));
    }
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or(crate::Error::SingularMatrix { name, condition })
}

/// Orthonormal basis of the null space of `m`, taken as the right singular
/// vectors belonging to the `dim` smallest singular values.
pub fn null_space(m: &CMatrix, dim: usize) -> Vec<CVector> {
    let cols = m.ncols();
    if dim == 0 || cols == 0 {
        return Vec::new();
    }
    // Pad to square so the SVD returns a full right basis.
    let mut square = CMatrix::zeros(cols.max(m.nrows()), cols);
    square.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    order
        .into_iter()
        .take(dim)
        .map(|i| v_t.row(i).adjoint())
        .collect()
}

pub fn hstack(left: &CMatrix, right: &CMatrix) -> CMatrix {
    assert_eq!(left.nrows(), right.nrows());
    let mut out = CMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.view_mut((0, 0), left.shape()).copy_from(left);
    out.view_mut((0, left.ncols()), right.shape()).copy_from(right);
    out
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
