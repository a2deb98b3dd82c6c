use alloc::string::String;

use super::{condition_ratio, ComplexMatrix, Tolerance, INVERTIBILITY_RATIO};
use crate::error::{Error, Result};

/// `‖A A* A − A‖_F` together with the comparison scale.
pub fn partial_isometry_residual(a: &ComplexMatrix) -> Result<(f64, f64)> {
    a.require_square()?;
    let aaa = &(a * &a.adjoint()) * a;
    let scale = aaa.frobenius_norm().max(a.frobenius_norm());
    Ok((aaa.distance(a), scale))
}

/// `A A* A = A` within tolerance. Equivalent to `A*A` (and `AA*`) being an
/// orthogonal projection.
pub fn is_partial_isometry(a: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    let (residual, scale) = partial_isometry_residual(a)?;
    Ok(tol.accepts(residual, scale))
}

/// `max(‖A*A − I‖_F, ‖AA* − I‖_F)`.
pub fn unitarity_residual(a: &ComplexMatrix) -> Result<f64> {
    let n = a.require_square()?;
    let id = ComplexMatrix::identity(n);
    let left = (&a.adjoint() * a).distance(&id);
    let right = (a * &a.adjoint()).distance(&id);
    Ok(left.max(right))
}

pub fn is_unitary(a: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    let n = a.require_square()?;
    Ok(tol.accepts(unitarity_residual(a)?, libm::sqrt(n as f64)))
}

pub fn is_normal(a: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    a.require_square()?;
    let adj = a.adjoint();
    let residual = (a * &adj).distance(&(&adj * a));
    Ok(tol.accepts(residual, a.frobenius_norm() * a.frobenius_norm()))
}

/// `P = P* = P²` within tolerance.
pub fn is_orthogonal_projection(p: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    p.require_square()?;
    let herm = p.distance(&p.adjoint());
    let sq = p * p;
    let idem = sq.distance(p);
    let scale = p.frobenius_norm().max(sq.frobenius_norm());
    Ok(tol.accepts(herm, scale) && tol.accepts(idem, scale))
}

/// The unitary `V = T S⁻¹` with `VS = T`, for invertible `S` with
/// `S*S = T*T`.
pub fn metric_unitary_from_pair(
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let n = s.require_square()?;
    t.require_shape((n, n))?;
    let ratio = condition_ratio(s);
    if ratio <= INVERTIBILITY_RATIO {
        return Err(Error::IllConditioned { ratio, index: None });
    }
    let gs = &s.adjoint() * s;
    let gt = &t.adjoint() * t;
    let residual = gs.distance(&gt);
    if !tol.accepts(residual, gs.frobenius_norm().max(gt.frobenius_norm())) {
        return Err(Error::Precondition {
            what: String::from("S*S != T*T"),
            residual,
        });
    }
    Ok(t * &s.inverse()?)
}
