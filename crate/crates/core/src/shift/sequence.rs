use alloc::borrow::Cow;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// How a two-sided sequence is described by finitely many matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `weight_at(n) = weights[n mod p]`.
    Periodic,
    /// `weights` cover `[lo, hi]`; identity outside.
    EventuallyIdentity { lo: i64 },
    /// `weights` cover `[lo, hi]`; access outside is an error.
    Windowed { lo: i64 },
}

/// A two-sided sequence of `dim × dim` matrices with a finite description.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    dim: usize,
    kind: SequenceKind,
    weights: Vec<ComplexMatrix>,
}

impl WeightSequence {
    fn build(kind: SequenceKind, weights: Vec<ComplexMatrix>) -> Result<Self> {
        let first = weights.first().ok_or(Error::Empty("weight sequence"))?;
        let dim = first.require_square()?;
        for w in &weights {
            w.require_shape((dim, dim))?;
        }
        Ok(Self { dim, kind, weights })
    }

    pub fn periodic(weights: Vec<ComplexMatrix>) -> Result<Self> {
        Self::build(SequenceKind::Periodic, weights)
    }

    pub fn eventually_identity(lo: i64, weights: Vec<ComplexMatrix>) -> Result<Self> {
        Self::build(SequenceKind::EventuallyIdentity { lo }, weights)
    }

    pub fn windowed(lo: i64, weights: Vec<ComplexMatrix>) -> Result<Self> {
        Self::build(SequenceKind::Windowed { lo }, weights)
    }

    /// The constant sequence `I`.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kind: SequenceKind::Periodic,
            weights: alloc::vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn constant(m: ComplexMatrix) -> Result<Self> {
        Self::periodic(alloc::vec![m])
    }

    /// Samples `f` on `[lo, hi]` into a windowed sequence.
    pub fn windowed_from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> ComplexMatrix) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(alloc::format!("empty window [{lo}, {hi}]")));
        }
        Self::windowed(lo, (lo..=hi).map(&mut f).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// The stored matrices, in index order (period order for periodic).
    pub fn stored(&self) -> &[ComplexMatrix] {
        &self.weights
    }

    pub fn period(&self) -> Option<usize> {
        match self.kind {
            SequenceKind::Periodic => Some(self.weights.len()),
            _ => None,
        }
    }

    /// Stored index range for the eventually-identity and windowed variants.
    pub fn stored_range(&self) -> Option<(i64, i64)> {
        match self.kind {
            SequenceKind::Periodic => None,
            SequenceKind::EventuallyIdentity { lo } | SequenceKind::Windowed { lo } => {
                Some((lo, lo + self.weights.len() as i64 - 1))
            }
        }
    }

    /// Indices where `weight_at` is defined; `None` means all of ℤ.
    pub fn valid_range(&self) -> Option<(i64, i64)> {
        match self.kind {
            SequenceKind::Windowed { .. } => self.stored_range(),
            _ => None,
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        self.valid_range().is_none_or(|(lo, hi)| lo <= n && n <= hi)
    }

    pub fn weight_at(&self, n: i64) -> Result<Cow<'_, ComplexMatrix>> {
        match self.kind {
            SequenceKind::Periodic => {
                let p = self.weights.len() as i64;
                Ok(Cow::Borrowed(&self.weights[n.rem_euclid(p) as usize]))
            }
            SequenceKind::EventuallyIdentity { lo } => {
                let hi = lo + self.weights.len() as i64 - 1;
                if n < lo || n > hi {
                    Ok(Cow::Owned(ComplexMatrix::identity(self.dim)))
                } else {
                    Ok(Cow::Borrowed(&self.weights[(n - lo) as usize]))
                }
            }
            SequenceKind::Windowed { lo } => {
                let hi = lo + self.weights.len() as i64 - 1;
                if n < lo || n > hi {
                    Err(Error::OutOfWindow { index: n, lo, hi })
                } else {
                    Ok(Cow::Borrowed(&self.weights[(n - lo) as usize]))
                }
            }
        }
    }

    /// The sequence `n ↦ weight_at(n − offset)`.
    pub fn shifted(&self, offset: i64) -> Self {
        let kind = match self.kind {
            SequenceKind::Periodic => {
                let p = self.weights.len() as i64;
                let mut weights = Vec::with_capacity(self.weights.len());
                for r in 0..p {
                    weights.push(self.weights[(r - offset).rem_euclid(p) as usize].clone());
                }
                return Self {
                    dim: self.dim,
                    kind: SequenceKind::Periodic,
                    weights,
                };
            }
            SequenceKind::EventuallyIdentity { lo } => SequenceKind::EventuallyIdentity { lo: lo + offset },
            SequenceKind::Windowed { lo } => SequenceKind::Windowed { lo: lo + offset },
        };
        Self {
            dim: self.dim,
            kind,
            weights: self.weights.clone(),
        }
    }

    /// Entry-wise adjoint. Identity tails stay identity.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            kind: self.kind.clone(),
            weights: self.weights.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// Restricts to the windowed sequence on `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Self> {
        let mut weights = Vec::new();
        for n in lo..=hi {
            weights.push(self.weight_at(n)?.into_owned());
        }
        Self::windowed(lo, weights)
    }

    /// Largest Frobenius norm among stored weights.
    pub fn max_stored_norm(&self) -> f64 {
        self.weights.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;

    fn w(x: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(2, re(x))
    }

    #[test]
    fn periodic_indexing_wraps_negative() {
        let seq = WeightSequence::periodic(alloc::vec![w(0.0), w(1.0)]).unwrap();
        assert_eq!(*seq.weight_at(-3).unwrap(), w(1.0));
        assert_eq!(*seq.weight_at(4).unwrap(), w(0.0));
    }

    #[test]
    fn eventually_identity_tail() {
        let seq = WeightSequence::eventually_identity(0, alloc::vec![w(2.0), w(3.0)]).unwrap();
        assert_eq!(*seq.weight_at(7).unwrap(), ComplexMatrix::identity(2));
        assert_eq!(*seq.weight_at(1).unwrap(), w(3.0));
    }

    #[test]
    fn windowed_access_outside_fails() {
        let seq = WeightSequence::windowed(0, alloc::vec![w(2.0), w(3.0)]).unwrap();
        assert_eq!(
            seq.weight_at(2).unwrap_err(),
            Error::OutOfWindow { index: 2, lo: 0, hi: 1 }
        );
    }

    #[test]
    fn shifting_moves_content_right() {
        let seq = WeightSequence::periodic(alloc::vec![w(0.0), w(1.0), w(2.0)]).unwrap();
        let moved = seq.shifted(1);
        for n in -5..5 {
            assert_eq!(moved.weight_at(n).unwrap(), seq.weight_at(n - 1).unwrap());
        }
        let ei = WeightSequence::eventually_identity(3, alloc::vec![w(5.0)]).unwrap().shifted(-2);
        assert_eq!(*ei.weight_at(1).unwrap(), w(5.0));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(WeightSequence::periodic(alloc::vec![w(1.0), ComplexMatrix::identity(3)]).is_err());
        assert!(WeightSequence::periodic(alloc::vec![]).is_err());
    }
}
