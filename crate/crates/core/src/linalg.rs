//! Real linear algebra on `H ≅ R⁴`, backed by `nalgebra`.

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::quat::Quaternion;

/// Matrix of the real-linear map `α ↦ f(α)` in the basis `{1, i, j, k}`.
pub fn real_matrix(f: impl Fn(Quaternion) -> Quaternion) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for (col, e) in Quaternion::BASIS.iter().enumerate() {
        let v = f(*e).to_array();
        for (row, x) in v.iter().enumerate() {
            m[(row, col)] = *x;
        }
    }
    m
}

/// Solves `M x = b` for the 4×4 real system; `None` if `M` is singular.
pub fn solve4(m: &Matrix4<f64>, b: Quaternion) -> Option<Quaternion> {
    let rhs = Vector4::from(b.to_array());
    m.lu().solve(&rhs).map(|x| Quaternion::new(x[0], x[1], x[2], x[3]))
}

/// Numerical rank of a dense real matrix, with singular values below
/// `rel_tol · σ_max` treated as zero.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}
