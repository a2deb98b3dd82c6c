//! Dense complex matrices and the decompositions used throughout the crate.
//!
//! [`ComplexMatrix`] wraps a heap-allocated `nalgebra` matrix of
//! [`Complex64`] entries and enforces finiteness at construction.
//! Arithmetic operators panic on shape mismatch, matching `nalgebra`; the
//! named operations in the submodules validate shapes and return
//! [`Error`](crate::Error) instead.

mod decomp;
mod predicates;
mod rank1;
mod simdiag;
mod tolerance;

pub use decomp::{condition_ratio, hermitian_eigen, is_quasi_invertible, polar_decompose, Polar, INVERTIBILITY_RATIO};
pub use predicates::{
    is_normal, is_orthogonal_projection, is_partial_isometry, is_unitary, metric_unitary_from_pair,
    partial_isometry_residual, unitarity_residual,
};
pub use rank1::rank1_positive_decomposition;
pub use simdiag::{simultaneous_diagonalize, SimultaneousDiagonalization};
pub use tolerance::Tolerance;

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shorthand for a real number lifted to [`Complex64`].
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Shorthand for `x + iy`.
#[inline]
pub fn c64(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Empty("matrix dimensions must be positive"));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    /// Wraps a matrix produced by internal arithmetic on finite inputs.
    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        Self(inner)
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(r > 0 && c > 0, "empty matrix");
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(r > 0 && c > 0, "empty matrix");
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self(DMatrix::from_fn(r, c, |i, j| re(rows[i][j])))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn scalar(n: usize, value: Complex64) -> Self {
        Self(DMatrix::identity(n, n) * value)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { re(0.0) }))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    pub(crate) fn require_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() == shape {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: shape,
                found: self.shape(),
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn entries_row_major(&self) -> Vec<Complex64> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(re(factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let sv = self.0.clone().svd(false, false).singular_values;
        let mut out: Vec<f64> = sv.iter().copied().collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Operator (spectral) norm: the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self, abs: f64) -> bool {
        self.frobenius_norm() <= abs
    }

    /// Inverse, or [`Error::IllConditioned`] when the matrix fails the
    /// invertibility threshold.
    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let ratio = condition_ratio(self);
        if ratio <= INVERTIBILITY_RATIO {
            return Err(Error::IllConditioned { ratio, index: None });
        }
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or(Error::IllConditioned { ratio, index: None })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * re(0.5))
    }

    /// Skew part as a Hermitian matrix, `(M - M*)/(2i)`.
    pub fn skew_hermitian_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()) * c64(0.0, -0.5))
    }

    /// Block-diagonal part: off-diagonal entries set to zero.
    pub fn diagonal_part(&self) -> Self {
        let (r, c) = self.shape();
        Self(DMatrix::from_fn(r, c, |i, j| if i == j { self.0[(i, j)] } else { re(0.0) }))
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        let (r, c) = self.shape();
        let mut acc = 0.0;
        for i in 0..r {
            for j in 0..c {
                if i != j {
                    acc += self.0[(i, j)].norm_sqr();
                }
            }
        }
        libm::sqrt(acc)
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }

    /// Matrix-vector product. Panics when `v.len() != cols`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols(), "vector length mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Distance `‖self − other‖_F`. Panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}[", self.shape())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.0[(i, j)];
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}
