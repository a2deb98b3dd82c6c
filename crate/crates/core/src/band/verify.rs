use alloc::borrow::Cow;
use alloc::collections::BTreeSet;
use alloc::string::String;

use super::{BandedOperator, ConditionCheck, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{condition_ratio, ComplexMatrix, Tolerance, INVERTIBILITY_RATIO};
use crate::shift::{BilateralShift, WeightSequence};

/// Maps out-of-window access to `None` so the caller can skip the check.
pub(crate) fn fetch(seq: &WeightSequence, n: i64) -> Result<Option<Cow<'_, ComplexMatrix>>> {
    match seq.weight_at(n) {
        Ok(w) => Ok(Some(w)),
        Err(Error::OutOfWindow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn require_same_dim(dims: &[usize]) -> Result<usize> {
    let d = dims[0];
    for &other in &dims[1..] {
        if other != d {
            return Err(Error::Dimension {
                expected: (d, d),
                found: (other, other),
            });
        }
    }
    Ok(d)
}

/// Checks `AS = TA` entry by entry on rows `lo..=hi`.
///
/// With `(Sx)_n = S_n x_{n−1}`, the `(i+1, j)` entry of `AS = TA` reads
/// `A_{i+1,j+1} S_{j+1} = T_{i+1} A_{i,j}`; only stored band offsets
/// `j − i` can be nonzero on either side.
pub fn verify_intertwining(
    a: &BandedOperator,
    s: &BilateralShift,
    t: &BilateralShift,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<WindowReport> {
    require_same_dim(&[a.dim(), s.dim(), t.dim()])?;
    let mut report = WindowReport::new(lo, hi);
    for i in lo..=hi {
        for (&k, band) in a.bands() {
            let j = i + k;
            let (Some(a_next), Some(a_here), Some(s_w), Some(t_w)) = (
                fetch(band, i + 1)?,
                fetch(band, i)?,
                fetch(s.weights(), j + 1)?,
                fetch(t.weights(), i + 1)?,
            ) else {
                report.skip("AS=TA", i);
                continue;
            };
            let lhs = &*a_next * &*s_w;
            let rhs = &*t_w * &*a_here;
            let scale = lhs.frobenius_norm().max(rhs.frobenius_norm());
            report.record("AS=TA", i, Some(j), lhs.distance(&rhs), scale, tol);
        }
    }
    Ok(report)
}

/// Checks that every band is either entirely zero or entirely nonzero on
/// rows `lo..=hi` ("nonzero" means Frobenius norm above `tol.abs`).
///
/// When a pair of shifts is supplied, both must have quasi-invertible
/// weights and `AS = TA` must hold on the window; otherwise the check is
/// purely structural, i.e. it certifies that `A` cannot intertwine any
/// pair of shifts with quasi-invertible weights.
pub fn check_diagonal_propagation(
    a: &BandedOperator,
    shifts: Option<(&BilateralShift, &BilateralShift)>,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<WindowReport> {
    if let Some((s, t)) = shifts {
        for shift in [s, t] {
            if let Some(w) = shift.weights().stored().iter().find(|w| condition_ratio(w) <= INVERTIBILITY_RATIO) {
                return Err(Error::IllConditioned {
                    ratio: condition_ratio(w),
                    index: None,
                });
            }
        }
        let inter = verify_intertwining(a, s, t, lo, hi, tol)?;
        if !inter.passed {
            return Err(Error::Precondition {
                what: String::from("AS != TA on the window"),
                residual: inter.max_residual(),
            });
        }
    }
    let mut report = WindowReport::new(lo, hi);
    for (&k, band) in a.bands() {
        let mut norms = alloc::vec::Vec::new();
        for n in lo..=hi {
            match fetch(band, n)? {
                Some(w) => norms.push((n, w.frobenius_norm())),
                None => report.skip("band propagation", n),
            }
        }
        let any_nonzero = norms.iter().any(|&(_, v)| v > tol.abs);
        let any_zero = norms.iter().any(|&(_, v)| v <= tol.abs);
        let mixed = any_nonzero && any_zero;
        for (n, norm) in norms {
            report.push(ConditionCheck {
                condition: "band propagation",
                row: n,
                column: Some(n + k),
                residual: norm,
                threshold: tol.abs,
                passed: !mixed || norm > tol.abs,
            });
        }
    }
    Ok(report)
}

/// Checks `UU* = I` and `U*U = I` entry by entry on rows `lo..=hi`.
pub fn verify_unitary(u: &BandedOperator, lo: i64, hi: i64, tol: &Tolerance) -> Result<WindowReport> {
    let offsets = u.offsets();
    let set: BTreeSet<i64> = offsets.iter().copied().collect();
    let mut diffs = BTreeSet::new();
    for &k in &offsets {
        for &l in &offsets {
            if k >= l {
                diffs.insert(k - l);
            }
        }
    }
    let dim = u.dim();
    let id = ComplexMatrix::identity(dim);
    let mut report = WindowReport::new(lo, hi);
    for n in lo..=hi {
        for &d in &diffs {
            // (UU*)_{n, n+d} = ∑_k U_{n,n+k} U_{n+d,n+k}*
            let mut acc = ComplexMatrix::zeros(dim, dim);
            let mut scale = if d == 0 { libm::sqrt(dim as f64) } else { 0.0 };
            let mut complete = true;
            for &k in &offsets {
                if !set.contains(&(k - d)) {
                    continue;
                }
                match (u.entry(n, n + k).ok().flatten(), u.entry(n + d, n + k).ok().flatten()) {
                    (Some(x), Some(y)) => {
                        let term = &*x * &y.adjoint();
                        scale += term.frobenius_norm();
                        acc = &acc + &term;
                    }
                    _ => complete = false,
                }
            }
            if complete {
                let target = if d == 0 { &id } else { &ComplexMatrix::zeros(dim, dim) };
                report.record("UU*=I", n, Some(n + d), acc.distance(target), scale, tol);
            } else {
                report.skip("UU*=I", n);
            }

            // (U*U)_{n, n+d} = ∑_k U_{n−k,n}* U_{n−k,n+d}
            let mut acc = ComplexMatrix::zeros(dim, dim);
            let mut scale = if d == 0 { libm::sqrt(dim as f64) } else { 0.0 };
            let mut complete = true;
            for &k in &offsets {
                if !set.contains(&(k + d)) {
                    continue;
                }
                match (u.entry(n - k, n).ok().flatten(), u.entry(n - k, n + d).ok().flatten()) {
                    (Some(x), Some(y)) => {
                        let term = &x.adjoint() * &*y;
                        scale += term.frobenius_norm();
                        acc = &acc + &term;
                    }
                    _ => complete = false,
                }
            }
            if complete {
                let target = if d == 0 { &id } else { &ComplexMatrix::zeros(dim, dim) };
                report.record("U*U=I", n, Some(n + d), acc.distance(target), scale, tol);
            } else {
                report.skip("U*U=I", n);
            }
        }
    }
    Ok(report)
}
