use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;

use super::verify::fetch;
use super::{BandedOperator, ConditionCheck, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{partial_isometry_residual, ComplexMatrix, Tolerance};
use crate::shift::WeightSequence;

type Entry<'a> = Cow<'a, ComplexMatrix>;

fn two_bands(u: &BandedOperator) -> Result<(i64, &WeightSequence, &WeightSequence)> {
    let offsets = u.offsets();
    if offsets.len() != 2 {
        return Err(Error::BandPattern(alloc::format!(
            "expected exactly 2 bands, found {}",
            offsets.len()
        )));
    }
    let (k1, k2) = (offsets[0], offsets[1]);
    Ok((k2 - k1, &u.bands()[&k1], &u.bands()[&k2]))
}

fn check_identity(report: &mut WindowReport, cond: &'static str, n: i64, sum: &ComplexMatrix, tol: &Tolerance) {
    let id = ComplexMatrix::identity(sum.rows());
    let scale = sum.frobenius_norm().max(id.frobenius_norm());
    report.record(cond, n, None, sum.distance(&id), scale, tol);
}

fn check_zero(report: &mut WindowReport, cond: &'static str, n: i64, value: &ComplexMatrix, scale: f64, tol: &Tolerance) {
    report.record(cond, n, None, value.frobenius_norm(), scale, tol);
}

fn fro(m: &ComplexMatrix) -> f64 {
    m.frobenius_norm()
}

/// Unitarity of a two-band operator, bands `k1 < k2`, `k = k2 − k1`,
/// `A_n = U_{n,n+k1}`, `B_n = U_{n,n+k2}`:
///
/// * `A_n A_n* + B_n B_n* = I`
/// * `A_{n+k}* A_{n+k} + B_n* B_n = I`
/// * `A_{n+k} B_n* = 0`
/// * `A_n* B_n = 0`
pub fn verify_unitary_two_band(u: &BandedOperator, lo: i64, hi: i64, tol: &Tolerance) -> Result<WindowReport> {
    let (k, band_a, band_b) = two_bands(u)?;
    let mut report = WindowReport::new(lo, hi);
    for n in lo..=hi {
        let (a, b, a_k) = (fetch(band_a, n)?, fetch(band_b, n)?, fetch(band_a, n + k)?);
        if let (Some(a), Some(b)) = (&a, &b) {
            let aa = &**a * &a.adjoint();
            let bb = &**b * &b.adjoint();
            check_identity(&mut report, "AA*+BB*=I", n, &(&aa + &bb), tol);
            check_zero(&mut report, "A*B=0", n, &(&a.adjoint() * &**b), fro(a) * fro(b), tol);
        } else {
            report.skip("AA*+BB*=I", n);
            report.skip("A*B=0", n);
        }
        if let (Some(a_k), Some(b)) = (&a_k, &b) {
            let sum = &(&a_k.adjoint() * &**a_k) + &(&b.adjoint() * &**b);
            check_identity(&mut report, "A_{n+k}*A_{n+k}+B*B=I", n, &sum, tol);
            check_zero(&mut report, "A_{n+k}B*=0", n, &(&**a_k * &b.adjoint()), fro(a_k) * fro(b), tol);
        } else {
            report.skip("A_{n+k}*A_{n+k}+B*B=I", n);
            report.skip("A_{n+k}B*=0", n);
        }
    }
    Ok(report)
}

/// Per-row structure of a two-band operator without the unitarity
/// precondition: partial isometries on both bands, `ran A_n ⊥ ran B_n`,
/// and `ran B_n* ⊥ ran A_{n+k}*`.
pub fn two_band_structure_report(u: &BandedOperator, lo: i64, hi: i64, tol: &Tolerance) -> Result<WindowReport> {
    let (k, band_a, band_b) = two_bands(u)?;
    let mut report = WindowReport::new(lo, hi);
    for n in lo..=hi {
        let (Some(a), Some(b)) = (fetch(band_a, n)?, fetch(band_b, n)?) else {
            report.skip("partial isometry", n);
            continue;
        };
        for (cond, m) in [("A partial isometry", &a), ("B partial isometry", &b)] {
            let (residual, scale) = partial_isometry_residual(m)?;
            report.record(cond, n, None, residual, scale, tol);
        }
        check_zero(&mut report, "ran A ⊥ ran B", n, &(&a.adjoint() * &*b), fro(&a) * fro(&b), tol);
        match fetch(band_a, n + k)? {
            Some(a_k) => check_zero(
                &mut report,
                "ran B* ⊥ ran A*",
                n,
                &(&*a_k * &b.adjoint()),
                fro(&a_k) * fro(&b),
                tol,
            ),
            None => report.skip("ran B* ⊥ ran A*", n),
        }
    }
    Ok(report)
}

/// Structure of a unitary two-band operator: both bands hold partial
/// isometries and each row has orthogonal ranges. Fails with a
/// precondition error when the operator is not unitary on the window.
pub fn check_two_band_structure(u: &BandedOperator, lo: i64, hi: i64, tol: &Tolerance) -> Result<WindowReport> {
    let unitary = verify_unitary_two_band(u, lo, hi, tol)?;
    if !unitary.passed {
        return Err(Error::Precondition {
            what: String::from("two-band operator is not unitary on the window"),
            residual: unitary.max_residual(),
        });
    }
    two_band_structure_report(u, lo, hi, tol)
}

/// Unitarity of the tridiagonal operator with `A_n = U_{n,n−1}`,
/// `B_n = U_{n,n}`, `C_n = U_{n,n+1}`:
///
/// * `A_n A_n* + B_n B_n* + C_n C_n* = I`
/// * `C_n A_{n+2}* = 0`
/// * `A_{n+1} B_n* + B_{n+1} C_n* = 0`
/// * `A_{n+2}* A_{n+2} + B_{n+1}* B_{n+1} + C_n* C_n = I`
/// * `A_n* C_n = 0`
/// * `C_n* B_n + B_{n+1}* A_{n+1} = 0`
pub fn verify_unitary_three_band(u: &BandedOperator, lo: i64, hi: i64, tol: &Tolerance) -> Result<WindowReport> {
    if u.offsets() != [-1, 0, 1] {
        return Err(Error::BandPattern(alloc::format!(
            "expected bands at offsets -1, 0, 1, found {:?}",
            u.offsets()
        )));
    }
    let (ba, bb, bc) = (&u.bands()[&-1], &u.bands()[&0], &u.bands()[&1]);
    let mut report = WindowReport::new(lo, hi);
    for n in lo..=hi {
        let (a0, b0, c0): (Option<Entry<'_>>, _, _) = (fetch(ba, n)?, fetch(bb, n)?, fetch(bc, n)?);
        let (a1, b1) = (fetch(ba, n + 1)?, fetch(bb, n + 1)?);
        let a2 = fetch(ba, n + 2)?;

        match (&a0, &b0, &c0) {
            (Some(a), Some(b), Some(c)) => {
                let sum = &(&(&**a * &a.adjoint()) + &(&**b * &b.adjoint())) + &(&**c * &c.adjoint());
                check_identity(&mut report, "AA*+BB*+CC*=I", n, &sum, tol);
                check_zero(&mut report, "A*C=0", n, &(&a.adjoint() * &**c), fro(a) * fro(c), tol);
            }
            _ => {
                report.skip("AA*+BB*+CC*=I", n);
                report.skip("A*C=0", n);
            }
        }
        match (&c0, &a2) {
            (Some(c), Some(a2)) => check_zero(&mut report, "CA_{n+2}*=0", n, &(&**c * &a2.adjoint()), fro(c) * fro(a2), tol),
            _ => report.skip("CA_{n+2}*=0", n),
        }
        match (&a1, &b0, &b1, &c0) {
            (Some(a1), Some(b0), Some(b1), Some(c0)) => {
                let x = &**a1 * &b0.adjoint();
                let y = &**b1 * &c0.adjoint();
                let scale = fro(a1) * fro(b0) + fro(b1) * fro(c0);
                check_zero(&mut report, "A_{n+1}B*+B_{n+1}C*=0", n, &(&x + &y), scale, tol);
                let x = &c0.adjoint() * &**b0;
                let y = &b1.adjoint() * &**a1;
                let scale = fro(c0) * fro(b0) + fro(b1) * fro(a1);
                check_zero(&mut report, "C*B+B_{n+1}*A_{n+1}=0", n, &(&x + &y), scale, tol);
            }
            _ => {
                report.skip("A_{n+1}B*+B_{n+1}C*=0", n);
                report.skip("C*B+B_{n+1}*A_{n+1}=0", n);
            }
        }
        match (&a2, &b1, &c0) {
            (Some(a2), Some(b1), Some(c0)) => {
                let sum = &(&(&a2.adjoint() * &**a2) + &(&b1.adjoint() * &**b1)) + &(&c0.adjoint() * &**c0);
                check_identity(&mut report, "A_{n+2}*A_{n+2}+B_{n+1}*B_{n+1}+C*C=I", n, &sum, tol);
            }
            _ => report.skip("A_{n+2}*A_{n+2}+B_{n+1}*B_{n+1}+C*C=I", n),
        }
    }
    Ok(report)
}

/// Result of [`check_band_count_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandCountReport {
    pub report: WindowReport,
    /// Number of bands with a nonzero entry on the window.
    pub effective_count: usize,
}

/// For an operator whose entries are partial isometries: in every row the
/// range projections `U_n^{(j)} U_n^{(j)}*` are mutually orthogonal and sum
/// to `I`, and at most `m` bands are nonzero.
pub fn check_band_count_bound(
    u: &BandedOperator,
    m: usize,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<BandCountReport> {
    let dim = u.dim();
    let mut report = WindowReport::new(lo, hi);
    let mut nonzero_bands = alloc::collections::BTreeSet::new();
    for n in lo..=hi {
        let mut projections: Vec<(i64, ComplexMatrix)> = Vec::new();
        let mut complete = true;
        for (&k, band) in u.bands() {
            let Some(entry) = fetch(band, n)? else {
                complete = false;
                continue;
            };
            let (residual, scale) = partial_isometry_residual(&entry)?;
            if !tol.accepts(residual, scale) {
                return Err(Error::Precondition {
                    what: alloc::format!("entry ({n}, {}) is not a partial isometry", n + k),
                    residual,
                });
            }
            if entry.frobenius_norm() > tol.abs {
                nonzero_bands.insert(k);
            }
            projections.push((k, &*entry * &entry.adjoint()));
        }
        if !complete {
            report.skip("projections sum to I", n);
            continue;
        }
        for (i, (_, p)) in projections.iter().enumerate() {
            for (_, q) in &projections[i + 1..] {
                check_zero(&mut report, "orthogonal ranges", n, &(p * q), fro(p) * fro(q), tol);
            }
        }
        let sum = projections
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (_, p)| &acc + p);
        check_identity(&mut report, "projections sum to I", n, &sum, tol);
    }
    let effective_count = nonzero_bands.len();
    report.push(ConditionCheck {
        condition: "band count bound",
        row: lo,
        column: None,
        residual: effective_count as f64,
        threshold: m as f64,
        passed: effective_count <= m,
    });
    Ok(BandCountReport {
        report,
        effective_count,
    })
}
