use alloc::string::String;
use alloc::vec::Vec;

use super::{hermitian_eigen, ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Coefficients `a_i ≥ 0` with `A_i = a_i C` and `∑ a_i = 1`, for positive
/// semidefinite `A_i` summing to a rank-one `C`.
///
/// The fit is `a_i = tr(A_i) / tr(C)`; every `A_i` is then checked against
/// `a_i C`.
pub fn rank1_positive_decomposition(
    parts: &[ComplexMatrix],
    sum: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    if parts.is_empty() {
        return Err(Error::Empty("no summands"));
    }
    let n = sum.require_square()?;
    let mut total = ComplexMatrix::zeros(n, n);
    for (i, a) in parts.iter().enumerate() {
        a.require_shape((n, n))?;
        let herm = a.distance(&a.adjoint());
        let (values, _) = hermitian_eigen(a)?;
        let min = values.last().copied().unwrap_or(0.0);
        let scale = a.frobenius_norm();
        if !tol.accepts(herm, scale) || !tol.accepts((-min).max(0.0), scale) {
            return Err(Error::Precondition {
                what: alloc::format!("summand {i} is not positive semidefinite"),
                residual: herm.max(-min),
            });
        }
        total = &total + a;
    }
    let residual = total.distance(sum);
    if !tol.accepts(residual, total.frobenius_norm().max(sum.frobenius_norm())) {
        return Err(Error::Precondition {
            what: String::from("summands do not add up to C"),
            residual,
        });
    }

    let sv = sum.singular_values();
    let rank = sv.iter().filter(|&&s| !tol.accepts(s, sv[0])).count();
    if rank != 1 {
        return Err(Error::Rank {
            expected: 1,
            found: rank,
        });
    }

    let trace = sum.trace().re;
    let scale = sum.frobenius_norm();
    let mut coefficients = Vec::with_capacity(parts.len());
    for (i, a) in parts.iter().enumerate() {
        let coeff = (a.trace().re / trace).max(0.0);
        let residual = a.distance(&sum.scale_real(coeff));
        if !tol.accepts(residual, scale) {
            return Err(Error::Decomposition { index: i, residual });
        }
        coefficients.push(coeff);
    }
    Ok(coefficients)
}
