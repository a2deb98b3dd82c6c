use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::verify::{fetch, verify_unitary};
use super::{BandedOperator, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::shift::{BilateralShift, WeightSequence};

#[derive(Debug, Clone, PartialEq)]
pub enum Conjugation {
    /// `USU*` is a weighted shift; weights are windowed to the rows checked.
    Shift(BilateralShift),
    /// Off-band residuals of `USU*`.
    NotAShift(WindowReport),
}

/// Computes `T = USU*` entry-wise on rows `lo..=hi`.
///
/// `(USU*)_{p,q} = ∑_i U_{p,i} S_i U_{q,i−1}*`, so band `k1` of the left
/// factor meets band `k2` of the right one at `q = p + k1 − k2 − 1`.
/// Only `q = p − 1` may survive.
pub fn conjugate_to_shift(
    u: &BandedOperator,
    s: &BilateralShift,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<Conjugation> {
    if u.dim() != s.dim() {
        return Err(Error::Dimension {
            expected: (u.dim(), u.dim()),
            found: (s.dim(), s.dim()),
        });
    }
    let unitary = verify_unitary(u, lo, hi, tol)?;
    if !unitary.passed {
        return Err(Error::Precondition {
            what: String::from("U is not unitary on the window"),
            residual: unitary.max_residual(),
        });
    }
    let dim = u.dim();
    let mut report = WindowReport::new(lo, hi);
    let mut weights = Vec::new();
    for p in lo..=hi {
        let mut blocks: BTreeMap<i64, (ComplexMatrix, f64)> = BTreeMap::new();
        let mut complete = true;
        for (&k1, left) in u.bands() {
            let (Some(a), Some(sw)) = (fetch(left, p)?, fetch(s.weights(), p + k1)?) else {
                complete = false;
                continue;
            };
            let a_s = &*a * &*sw;
            for (&k2, right) in u.bands() {
                let d = k1 - k2 - 1;
                let Some(b) = fetch(right, p + d)? else {
                    complete = false;
                    continue;
                };
                let term = &a_s * &b.adjoint();
                let scale = a.frobenius_norm() * sw.frobenius_norm() * b.frobenius_norm();
                let slot = blocks.entry(d).or_insert_with(|| (ComplexMatrix::zeros(dim, dim), 0.0));
                slot.0 = &slot.0 + &term;
                slot.1 += scale;
            }
        }
        if !complete {
            return Err(Error::Precondition {
                what: alloc::format!("USU* row {p} needs entries outside the window"),
                residual: f64::NAN,
            });
        }
        for (&d, (block, scale)) in &blocks {
            if d != -1 {
                report.record("off-band", p, Some(p + d), block.frobenius_norm(), *scale, tol);
            }
        }
        weights.push(blocks.remove(&-1).map(|b| b.0).unwrap_or_else(|| ComplexMatrix::zeros(dim, dim)));
    }
    if !report.passed {
        return Ok(Conjugation::NotAShift(report));
    }
    let label = alloc::format!("U{}U*", s.label());
    Ok(Conjugation::Shift(BilateralShift::new(WeightSequence::windowed(lo, weights)?, label)?))
}
