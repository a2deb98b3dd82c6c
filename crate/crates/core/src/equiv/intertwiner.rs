use alloc::vec::Vec;

use crate::band::{verify_intertwining, BandedOperator, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{polar_decompose, unitarity_residual, ComplexMatrix, Tolerance};
use crate::shift::{BilateralShift, WeightSequence};

/// Where a witness is known to be valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessScope {
    /// The entries extend to a unitary on all of `ℓ²(ℤ, ℂ^dim)`.
    Global,
    /// Only the rows stored are known to intertwine.
    Window,
}

/// Entries `V_n = U_{n, n+m}` of a diagonal-form intertwiner.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalWitness {
    pub offset: i64,
    pub lo: i64,
    pub entries: Vec<ComplexMatrix>,
    pub scope: WitnessScope,
}

impl DiagonalWitness {
    pub fn hi(&self) -> i64 {
        self.lo + self.entries.len() as i64 - 1
    }

    pub fn entry(&self, n: i64) -> Option<&ComplexMatrix> {
        usize::try_from(n - self.lo).ok().and_then(|i| self.entries.get(i))
    }

    /// The single-band operator at offset `m` holding the entries.
    pub fn operator(&self) -> Result<BandedOperator> {
        Ok(BandedOperator::single_band(
            self.offset,
            WeightSequence::windowed(self.lo, self.entries.clone())?,
        ))
    }

    /// `US = TU` on the stored rows plus unitarity of every entry.
    pub fn verify(&self, s: &BilateralShift, t: &BilateralShift, tol: &Tolerance) -> Result<WindowReport> {
        let mut report = if self.entries.len() > 1 {
            verify_intertwining(&self.operator()?, s, t, self.lo, self.hi() - 1, tol)?
        } else {
            WindowReport::new(self.lo, self.hi())
        };
        let dim = s.dim();
        for (i, v) in self.entries.iter().enumerate() {
            report.record(
                "V unitary",
                self.lo + i as i64,
                Some(self.lo + i as i64 + self.offset),
                unitarity_residual(v)?,
                libm::sqrt(dim as f64),
                tol,
            );
        }
        Ok(report)
    }
}

fn invert_at(m: &ComplexMatrix, index: i64) -> Result<ComplexMatrix> {
    m.inverse().map_err(|e| match e {
        Error::IllConditioned { ratio, .. } => Error::IllConditioned {
            ratio,
            index: Some(index),
        },
        other => other,
    })
}

/// Step check plus projection back onto the unitaries to stop drift.
fn settle(v: ComplexMatrix, index: i64, tol: &Tolerance) -> Result<ComplexMatrix> {
    let residual = unitarity_residual(&v)?;
    if !tol.accepts(residual, libm::sqrt(v.rows() as f64)) {
        return Err(Error::GramViolation { index, residual });
    }
    Ok(polar_decompose(&v)?.unitary)
}

/// Propagates `V_0 = U0` through `V_{n+1} S_{m+n+1} = T_{n+1} V_n`.
///
/// Right: `V_{n+1} = T_{n+1} V_n S_{m+n+1}⁻¹`. Left:
/// `V_{n−1} = T_n⁻¹ V_n S_{m+n}`. Each entry must be unitary within `tol`;
/// the first one that is not is reported as a Gram violation at its row.
pub fn construct_diagonal_intertwiner(
    s: &BilateralShift,
    t: &BilateralShift,
    m: i64,
    u0: &ComplexMatrix,
    lo: i64,
    hi: i64,
    tol: &Tolerance,
) -> Result<DiagonalWitness> {
    if !(lo <= 0 && 0 <= hi) {
        return Err(Error::InvalidArgument(alloc::format!("window [{lo}, {hi}] must contain row 0")));
    }
    if s.dim() != t.dim() || u0.shape() != (s.dim(), s.dim()) {
        return Err(Error::Dimension {
            expected: (s.dim(), s.dim()),
            found: u0.shape(),
        });
    }
    let v0 = settle(u0.clone(), 0, tol)?;
    let mut right = Vec::with_capacity(hi as usize);
    let mut current = v0.clone();
    for n in 0..hi {
        let s_inv = invert_at(&*s.weight(m + n + 1)?, m + n + 1)?;
        let next = &(&*t.weight(n + 1)? * &current) * &s_inv;
        current = settle(next, n + 1, tol)?;
        right.push(current.clone());
    }
    let mut left = Vec::with_capacity((-lo) as usize);
    current = v0.clone();
    for n in (lo + 1..=0).rev() {
        let t_inv = invert_at(&*t.weight(n)?, n)?;
        let next = &(&t_inv * &current) * &*s.weight(m + n)?;
        current = settle(next, n - 1, tol)?;
        left.push(current.clone());
    }
    left.reverse();
    left.push(v0);
    left.extend(right);
    Ok(DiagonalWitness {
        offset: m,
        lo,
        entries: left,
        scope: WitnessScope::Window,
    })
}
