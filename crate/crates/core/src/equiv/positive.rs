use alloc::vec::Vec;

use crate::band::{verify_intertwining, BandedOperator, WindowReport};
use crate::error::{Error, Result};
use crate::linalg::{condition_ratio, polar_decompose, ComplexMatrix, Tolerance, INVERTIBILITY_RATIO};
use crate::shift::{BilateralShift, SequenceKind, WeightSequence};

/// A shift with positive weights and the diagonal unitary `D` with
/// `D·S·D* = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveForm {
    pub shift: BilateralShift,
    pub conjugator: BandedOperator,
    /// `DS = TD` checked on the rows where both sides are defined.
    pub check: WindowReport,
}

/// Polar-decomposes `S_n = U_n P_n` and rotates the phases away.
///
/// `D_0 = I`, `D_n = D_{n−1} U_n*` going right, `D_{n−1} = D_n U_n` going
/// left, and `T_n = D_{n−1} P_n D_{n−1}*`. Eventually-identity input keeps
/// its identity tail; other input is windowed to `[lo, hi]`.
pub fn positive_form(s: &BilateralShift, lo: i64, hi: i64, tol: &Tolerance) -> Result<PositiveForm> {
    if hi < lo {
        return Err(Error::InvalidArgument(alloc::format!("empty window [{lo}, {hi}]")));
    }
    let support = match s.weights().kind() {
        SequenceKind::EventuallyIdentity { .. } => s.weights().stored_range(),
        _ => None,
    };
    let (lo, hi) = match support {
        Some((a, b)) => (lo.min(a), hi.max(b)),
        None => (lo, hi),
    };
    let anchor = if lo - 1 <= 0 && 0 <= hi { 0 } else { lo - 1 };

    let mut unitaries = Vec::with_capacity((hi - lo + 1) as usize);
    let mut positives = Vec::with_capacity(unitaries.capacity());
    for n in lo..=hi {
        let w = s.weight(n)?;
        let ratio = condition_ratio(&w);
        if ratio <= INVERTIBILITY_RATIO {
            return Err(Error::IllConditioned { ratio, index: Some(n) });
        }
        let polar = polar_decompose(&w)?;
        unitaries.push(polar.unitary);
        positives.push(polar.positive);
    }
    let at = |n: i64| (n - lo) as usize;

    // d[j] holds D_{lo−1+j}.
    let dim = s.dim();
    let mut d = alloc::vec![ComplexMatrix::identity(dim); (hi - lo + 2) as usize];
    let slot = |n: i64| (n - lo + 1) as usize;
    for n in anchor + 1..=hi {
        d[slot(n)] = &d[slot(n - 1)] * &unitaries[at(n)].adjoint();
    }
    for n in (lo..=anchor).rev() {
        d[slot(n - 1)] = &d[slot(n)] * &unitaries[at(n)];
    }

    let weights: Vec<ComplexMatrix> = (lo..=hi)
        .map(|n| {
            let dn = &d[slot(n - 1)];
            (&(dn * &positives[at(n)]) * &dn.adjoint()).hermitian_part()
        })
        .collect();
    let label = alloc::format!("|{}|", s.label());
    let t_seq = match support {
        Some((a, b)) => WeightSequence::eventually_identity(a, weights[at(a)..=at(b)].to_vec())?,
        None => WeightSequence::windowed(lo, weights)?,
    };
    let shift = BilateralShift::new(t_seq, label)?;
    let conjugator = BandedOperator::single_band(0, WeightSequence::windowed(lo - 1, d)?);
    let check = verify_intertwining(&conjugator, s, &shift, lo - 1, hi - 1, tol)?;
    if !check.passed {
        return Err(Error::Precondition {
            what: alloc::string::String::from("D·S·D* = T fails on the window"),
            residual: check.max_residual(),
        });
    }
    Ok(PositiveForm {
        shift,
        conjugator,
        check,
    })
}
