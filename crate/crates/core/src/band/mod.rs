//! Banded operators on `ℓ²(ℤ, ℂ^dim)`.
//!
//! Band offset `k` stores the entries `U_{n, n+k}` as a [`WeightSequence`]
//! indexed by the row `n`: `entry(i, j) = bands[j − i].weight_at(i)`.

mod conjugate;
mod report;
mod structure;
pub(crate) mod verify;

pub use conjugate::{conjugate_to_shift, Conjugation};
pub use report::{ConditionCheck, SkippedCheck, WindowReport};
pub use structure::{
    check_band_count_bound, check_two_band_structure, two_band_structure_report, verify_unitary_three_band,
    verify_unitary_two_band, BandCountReport,
};
pub use verify::{check_diagonal_propagation, verify_intertwining, verify_unitary};

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix};
use crate::shift::{WeightSequence, WindowedVector};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    dim: usize,
    bands: BTreeMap<i64, WeightSequence>,
}

impl BandedOperator {
    pub fn new(bands: BTreeMap<i64, WeightSequence>) -> Result<Self> {
        let dim = bands.values().next().ok_or(Error::Empty("banded operator needs a band"))?.dim();
        for seq in bands.values() {
            if seq.dim() != dim {
                return Err(Error::Dimension {
                    expected: (dim, dim),
                    found: (seq.dim(), seq.dim()),
                });
            }
        }
        let nonzero = bands.values().any(|seq| {
            matches!(seq.kind(), crate::shift::SequenceKind::EventuallyIdentity { .. }) || seq.max_stored_norm() > 0.0
        });
        if !nonzero {
            return Err(Error::BandPattern(alloc::string::String::from("all bands are zero")));
        }
        Ok(Self { dim, bands })
    }

    pub fn from_bands(bands: impl IntoIterator<Item = (i64, WeightSequence)>) -> Result<Self> {
        Self::new(bands.into_iter().collect())
    }

    pub fn single_band(offset: i64, seq: WeightSequence) -> Self {
        let mut bands = BTreeMap::new();
        bands.insert(offset, seq);
        Self::new(bands).expect("a single band is a valid operator unless it is identically zero")
    }

    pub fn identity(dim: usize) -> Self {
        Self::single_band(0, WeightSequence::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bands(&self) -> &BTreeMap<i64, WeightSequence> {
        &self.bands
    }

    pub fn band(&self, offset: i64) -> Option<&WeightSequence> {
        self.bands.get(&offset)
    }

    pub fn offsets(&self) -> Vec<i64> {
        self.bands.keys().copied().collect()
    }

    /// `U_{i,j}`; `None` for a structural zero.
    pub fn entry(&self, i: i64, j: i64) -> Result<Option<Cow<'_, ComplexMatrix>>> {
        match self.bands.get(&(j - i)) {
            Some(seq) => seq.weight_at(i).map(Some),
            None => Ok(None),
        }
    }

    /// Rows on which every band is defined; `None` means all of ℤ.
    pub fn valid_rows(&self) -> Option<(i64, i64)> {
        self.bands.values().filter_map(WeightSequence::valid_range).reduce(|a, b| (a.0.max(b.0), a.1.min(b.1)))
    }

    /// The adjoint operator: band `−k` holds `n ↦ U_{n−k, n}*`.
    pub fn adjoint(&self) -> Self {
        let bands = self.bands.iter().map(|(&k, seq)| (-k, seq.adjoint().shifted(k))).collect();
        Self { dim: self.dim, bands }
    }
}

/// `F^k · D` for a diagonal `D`: a single band at offset `−k` holding
/// `n ↦ D_{n−k}`.
pub fn diagonal_form(k: i64, diagonal: &WeightSequence) -> BandedOperator {
    BandedOperator::single_band(-k, diagonal.shifted(k))
}

/// `y_i = ∑_k U_{i,i+k} x_{i+k}`.
pub fn apply_banded(u: &BandedOperator, x: &WindowedVector) -> Result<WindowedVector> {
    if x.dim() != u.dim() {
        return Err(Error::Dimension {
            expected: (u.dim(), 1),
            found: (x.dim(), 1),
        });
    }
    let offsets = u.offsets();
    let kmin = *offsets.first().expect("non-empty");
    let kmax = *offsets.last().expect("non-empty");
    let lo = x.lo() - kmax;
    let hi = x.hi() - kmin;
    let mut y = WindowedVector::zeros(lo, hi, u.dim());
    for i in lo..=hi {
        let mut acc = alloc::vec![re(0.0); u.dim()];
        for &k in &offsets {
            if let Some(block) = x.block(i + k) {
                let entry = u.bands[&k].weight_at(i)?;
                for (a, b) in acc.iter_mut().zip(entry.apply(block)) {
                    *a += b;
                }
            }
        }
        *y.block_mut(i) = acc;
    }
    Ok(y)
}
