use alloc::vec::Vec;

use crate::band::{verify::fetch, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::shift::BilateralShift;

/// First row where `‖S_{n+k}‖ ≠ ‖T_n‖`, as `(n, residual, scale)`.
pub fn norm_mismatch(
    s: &BilateralShift,
    t: &BilateralShift,
    k: i64,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<Option<(i64, f64, f64)>> {
    for n in lo..=hi {
        let (Some(sw), Some(tw)) = (fetch(s.weights(), n + k)?, fetch(t.weights(), n)?) else {
            continue;
        };
        let (a, b) = (sw.operator_norm(), tw.operator_norm());
        let scale = a.max(b);
        if !tol.accepts((a - b).abs(), scale) {
            return Ok(Some((n, (a - b).abs(), scale)));
        }
    }
    Ok(None)
}

/// All `k ∈ [k_min, k_max]` with `‖S_{n+k}‖ ≈ ‖T_n‖` on every row of
/// `[lo, hi]` where both weights are defined.
pub fn norm_offset_screen(
    s: &BilateralShift,
    t: &BilateralShift,
    k_min: i64,
    k_max: i64,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<Vec<i64>> {
    let mut feasible = Vec::new();
    for k in k_min..=k_max {
        if norm_mismatch(s, t, k, lo, hi, tol)?.is_none() {
            feasible.push(k);
        }
    }
    Ok(feasible)
}

fn require_normal(w: &ComplexMatrix, which: &str, n: i64, tol: &Tolerance) -> Result<()> {
    let comm = w.commutator(&w.adjoint());
    let scale = w.frobenius_norm() * w.frobenius_norm();
    if !tol.accepts(comm.frobenius_norm(), scale) {
        return Err(Error::Precondition {
            what: alloc::format!("weight {which}_{n} is not normal"),
            residual: comm.frobenius_norm(),
        });
    }
    Ok(())
}

/// Compares eigenvalue moduli of `S_{n+k}` and `T_n` on `ℂ²`.
///
/// For normal matrices the moduli are the singular values, which is what
/// gets compared.
pub fn eigen_moduli_screen(
    s: &BilateralShift,
    t: &BilateralShift,
    k: i64,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<WindowReport> {
    for shift in [s, t] {
        if shift.dim() != 2 {
            return Err(Error::Dimension {
                expected: (2, 2),
                found: (shift.dim(), shift.dim()),
            });
        }
    }
    let mut report = WindowReport::new(lo, hi);
    for n in lo..=hi {
        let (Some(sw), Some(tw)) = (fetch(s.weights(), n + k)?, fetch(t.weights(), n)?) else {
            report.skip("eigenvalue moduli", n);
            continue;
        };
        require_normal(&sw, "S", n + k, tol)?;
        require_normal(&tw, "T", n, tol)?;
        let (a, b) = (sw.singular_values(), tw.singular_values());
        let residual = libm::sqrt(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>());
        let scale = a[0].max(b[0]);
        report.record("eigenvalue moduli", n, Some(n + k), residual, scale, tol);
    }
    Ok(report)
}

/// Whether every weight both screens would touch is normal.
pub(crate) fn all_normal(s: &BilateralShift, t: &BilateralShift, k: i64, lo: i64, hi: i64, tol: &Tolerance) -> bool {
    (lo..=hi).all(|n| {
        let pair = (fetch(s.weights(), n + k), fetch(t.weights(), n));
        match pair {
            (Ok(Some(sw)), Ok(Some(tw))) => {
                require_normal(&sw, "S", n + k, tol).is_ok() && require_normal(&tw, "T", n, tol).is_ok()
            }
            _ => true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::shift::WeightSequence;

    fn diag_shift(entries: &[(i64, [f64; 2])]) -> BilateralShift {
        let lo = entries[0].0;
        let w = entries.iter().map(|(_, d)| ComplexMatrix::diagonal(&[re(d[0]), re(d[1])])).collect();
        BilateralShift::new(WeightSequence::eventually_identity(lo, w).unwrap(), "d").unwrap()
    }

    #[test]
    fn reindexed_shift_found_at_offset() {
        let s = diag_shift(&[(0, [2.0, 1.0]), (1, [5.0, 1.0])]);
        let t = s.reindexed(-3);
        // T_n = S_{n+3}
        let ks = norm_offset_screen(&s, &t, -6, 6, -10, 10, &Tolerance::default()).unwrap();
        assert_eq!(ks, alloc::vec![3]);
        assert!(norm_offset_screen(&s, &s, -2, 2, -10, 10, &Tolerance::default()).unwrap().contains(&0));
    }

    #[test]
    fn swapped_diagonal_passes_moduli() {
        let s = diag_shift(&[(0, [2.0, 1.0])]);
        let t = diag_shift(&[(0, [1.0, 2.0])]);
        assert!(eigen_moduli_screen(&s, &t, 0, -2, 2, &Tolerance::default()).unwrap().passed);
        let u = diag_shift(&[(0, [1.0, 3.0])]);
        let rep = eigen_moduli_screen(&s, &u, 0, -2, 2, &Tolerance::default()).unwrap();
        assert_eq!(rep.first_failure().unwrap().row, 0);
    }

    #[test]
    fn non_normal_rejected() {
        let j = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let s = BilateralShift::new(WeightSequence::constant(j).unwrap(), "j").unwrap();
        let f = BilateralShift::unweighted(2);
        assert!(matches!(
            eigen_moduli_screen(&s, &f, 0, 0, 0, &Tolerance::default()),
            Err(Error::Precondition { .. })
        ));
        assert!(!all_normal(&s, &f, 0, 0, 0, &Tolerance::default()));
    }
}
