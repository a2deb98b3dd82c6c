//! Bilateral operator-valued weighted shifts.
//!
//! A shift `S` with weights `{S_n}` acts on `ℓ²(ℤ, ℂ^dim)` by
//! `(Sx)_n = S_n x_{n−1}`: weight `S_n` sits at matrix position `(n, n−1)`.

mod sequence;
mod vector;

pub use sequence::{SequenceKind, WeightSequence};
pub use vector::WindowedVector;

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{is_quasi_invertible, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct BilateralShift {
    weights: WeightSequence,
    label: String,
}

impl BilateralShift {
    /// Fails with [`Error::ZeroWeight`] if any stored weight is zero.
    pub fn new(weights: WeightSequence, label: impl Into<String>) -> Result<Self> {
        if let Some(pos) = weights.stored().iter().position(|w| w.frobenius_norm() == 0.0) {
            let index = match weights.stored_range() {
                Some((lo, _)) => lo + pos as i64,
                None => pos as i64,
            };
            return Err(Error::ZeroWeight { index });
        }
        Ok(Self {
            weights,
            label: label.into(),
        })
    }

    /// The unweighted bilateral shift `F` on `ℂ^dim`.
    pub fn unweighted(dim: usize) -> Self {
        Self {
            weights: WeightSequence::identity(dim),
            label: String::from("F"),
        }
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn weight(&self, n: i64) -> Result<Cow<'_, ComplexMatrix>> {
        self.weights.weight_at(n)
    }

    /// Every weight of the description passes the invertibility threshold.
    pub fn quasi_invertible(&self) -> bool {
        self.weights.stored().iter().all(is_quasi_invertible)
    }

    /// The shift with weights `n ↦ S_{n − offset}`.
    pub fn reindexed(&self, offset: i64) -> Self {
        Self {
            weights: self.weights.shifted(offset),
            label: self.label.clone(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// `(Sx)_n = S_n x_{n−1}` on the window `[x.lo + 1, x.hi + 1]`.
pub fn apply_shift(s: &BilateralShift, x: &WindowedVector) -> Result<WindowedVector> {
    if x.dim() != s.dim() {
        return Err(Error::Dimension {
            expected: (s.dim(), 1),
            found: (x.dim(), 1),
        });
    }
    let mut blocks = Vec::with_capacity(x.blocks().len());
    for (offset, block) in x.blocks().iter().enumerate() {
        let n = x.lo() + offset as i64 + 1;
        blocks.push(s.weight(n)?.apply(block));
    }
    WindowedVector::new(x.lo() + 1, blocks)
}

/// `S_{m+n−1} · … · S_{m+1} · S_m`.
pub fn product_forward(s: &BilateralShift, m: i64, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(String::from("product length must be positive")));
    }
    let mut acc = s.weight(m)?.into_owned();
    for j in 1..n as i64 {
        acc = &*s.weight(m + j)? * &acc;
    }
    Ok(acc)
}

/// `S_{m−n}* · … · S_{m−1}*`.
pub fn product_backward_adjoint(s: &BilateralShift, m: i64, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(String::from("product length must be positive")));
    }
    let mut acc = s.weight(m - 1)?.adjoint();
    for j in 2..=n as i64 {
        acc = &s.weight(m - j)?.adjoint() * &acc;
    }
    Ok(acc)
}

/// Operator norms `‖S_n‖` for `n = lo..=hi`.
pub fn weight_norm_profile(s: &BilateralShift, lo: i64, hi: i64) -> Result<Vec<f64>> {
    (lo..=hi).map(|n| Ok(s.weight(n)?.operator_norm())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;

    fn scalar_shift(values: &[f64]) -> BilateralShift {
        let weights = values.iter().map(|&v| ComplexMatrix::scalar(1, re(v))).collect();
        BilateralShift::new(WeightSequence::eventually_identity(0, weights).unwrap(), "s").unwrap()
    }

    #[test]
    fn identity_shift_moves_support() {
        let f = BilateralShift::unweighted(2);
        let x = WindowedVector::unit(0, alloc::vec![re(1.0), re(2.0)]).unwrap();
        let y = apply_shift(&f, &x).unwrap();
        assert_eq!((y.lo(), y.hi()), (1, 1));
        assert_eq!(y.block(1).unwrap(), x.block(0).unwrap());
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let s = scalar_shift(&[2.0, 3.0]);
        let y = apply_shift(&s, &WindowedVector::zeros(-2, 2, 1)).unwrap();
        assert_eq!(y.norm(), 0.0);
    }

    #[test]
    fn apply_uses_weight_at_target_index() {
        let s = scalar_shift(&[2.0, 3.0]);
        let x = WindowedVector::unit(0, alloc::vec![re(1.0)]).unwrap();
        assert_eq!(apply_shift(&s, &x).unwrap().block(1).unwrap()[0], re(3.0));
    }

    #[test]
    fn dimension_mismatch() {
        let x = WindowedVector::unit(0, alloc::vec![re(1.0)]).unwrap();
        assert!(matches!(
            apply_shift(&BilateralShift::unweighted(2), &x),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn zero_weight_rejected() {
        let seq = WeightSequence::eventually_identity(4, alloc::vec![ComplexMatrix::zeros(1, 1)]).unwrap();
        assert_eq!(BilateralShift::new(seq, "z").unwrap_err(), Error::ZeroWeight { index: 4 });
    }

    #[test]
    fn product_order() {
        let s = scalar_shift(&[2.0, 3.0, 5.0]);
        assert_eq!(product_forward(&s, 1, 1).unwrap().get(0, 0), re(3.0));
        assert_eq!(product_forward(&s, 0, 3).unwrap().get(0, 0), re(30.0));
        assert_eq!(product_backward_adjoint(&s, 2, 2).unwrap().get(0, 0), re(6.0));
        assert!(product_forward(&s, 0, 0).is_err());
        let f = BilateralShift::unweighted(2);
        assert_eq!(product_forward(&f, -4, 5).unwrap(), ComplexMatrix::identity(2));
        assert_eq!(product_backward_adjoint(&f, 3, 2).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn norm_profile_identity() {
        let f = BilateralShift::unweighted(3);
        assert!(weight_norm_profile(&f, -2, 2).unwrap().iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }
}
