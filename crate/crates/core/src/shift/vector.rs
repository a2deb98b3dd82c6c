use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{re, Complex64};

/// A vector of `ℓ²(ℤ, ℂ^dim)` supported on `[lo, hi]`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedVector {
    lo: i64,
    dim: usize,
    blocks: Vec<Vec<Complex64>>,
}

impl WindowedVector {
    pub fn new(lo: i64, blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = blocks.first().ok_or(Error::Empty("windowed vector"))?.len();
        if dim == 0 {
            return Err(Error::Empty("block dimension"));
        }
        for b in &blocks {
            if b.len() != dim {
                return Err(Error::Dimension {
                    expected: (dim, 1),
                    found: (b.len(), 1),
                });
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { lo, dim, blocks })
    }

    pub fn zeros(lo: i64, hi: i64, dim: usize) -> Self {
        assert!(hi >= lo && dim > 0, "empty window");
        Self {
            lo,
            dim,
            blocks: alloc::vec![alloc::vec![re(0.0); dim]; (hi - lo + 1) as usize],
        }
    }

    /// The block vector `e` placed at index `n`.
    pub fn unit(n: i64, block: Vec<Complex64>) -> Result<Self> {
        Self::new(n, alloc::vec![block])
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.blocks.len() as i64 - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    /// Block at `n`, `None` outside the stored window (implicit zero).
    pub fn block(&self, n: i64) -> Option<&[Complex64]> {
        if n < self.lo || n > self.hi() {
            None
        } else {
            Some(&self.blocks[(n - self.lo) as usize])
        }
    }

    pub(crate) fn block_mut(&mut self, n: i64) -> &mut Vec<Complex64> {
        let lo = self.lo;
        &mut self.blocks[(n - lo) as usize]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm_sqr()).sum::<f64>())
    }

    /// `‖self − other‖` over the union of both windows.
    pub fn distance(&self, other: &Self) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let zero = alloc::vec![re(0.0); self.dim.max(other.dim)];
        let mut acc = 0.0;
        for n in lo..=hi {
            let a = self.block(n).unwrap_or(&zero[..self.dim]);
            let b = other.block(n).unwrap_or(&zero[..other.dim]);
            acc += a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
        }
        libm::sqrt(acc)
    }
}
