use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{re, Complex64, ComplexMatrix};
use crate::error::Result;

/// A matrix is quasi-invertible when `σ_min / σ_max` exceeds this ratio.
pub const INVERTIBILITY_RATIO: f64 = 1e-10;

/// `σ_min / σ_max`, or `0` for the zero matrix.
pub fn condition_ratio(m: &ComplexMatrix) -> f64 {
    let sv = m.singular_values();
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    }
}

pub fn is_quasi_invertible(m: &ComplexMatrix) -> bool {
    m.is_square() && condition_ratio(m) > INVERTIBILITY_RATIO
}

/// Polar factors `M = W · P` with `W` unitary and `P = (M*M)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
}

/// Polar decomposition through the SVD `M = X Σ Y*`: `W = X Y*`,
/// `P = Y Σ Y*`. Total on square input; for singular `M` the unitary
/// factor is the one fixed by the SVD.
pub fn polar_decompose(m: &ComplexMatrix) -> Result<Polar> {
    let n = m.require_square()?;
    let svd = m.as_dmatrix().clone().svd(true, true);
    let x = svd.u.expect("requested U");
    let y_adj = svd.v_t.expect("requested V^T");
    let sigma = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            re(svd.singular_values[i])
        } else {
            re(0.0)
        }
    });
    let unitary = &x * &y_adj;
    let positive = y_adj.adjoint() * sigma * &y_adj;
    Ok(Polar {
        unitary: ComplexMatrix::wrap(unitary),
        positive: ComplexMatrix::wrap(positive).hermitian_part(),
    })
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns. Each eigenvector is rotated so that its
/// largest-modulus component (first one on ties) is real and positive.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = h.require_square()?;
    let sym = h.hermitian_part();
    let eig = SymmetricEigen::new(sym.into_dmatrix());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = re(0.0);
        for z in v.iter() {
            if z.norm() > pivot.norm() * (1.0 + 1e-12) {
                pivot = *z;
            }
        }
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            re(1.0)
        };
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok((values, ComplexMatrix::wrap(vectors)))
}
