#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod band;
pub mod equiv;
pub mod error;
pub mod linalg;
pub mod shift;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Complex64, Tolerance};
pub use shift::{BilateralShift, WeightSequence, WindowedVector};
