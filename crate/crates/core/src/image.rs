//! Complex reflectivity images over a [`SceneGrid`](crate::grid::SceneGrid).

use num_complex::Complex;

use crate::cvec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A complex-valued image flattened in grid order (row-major, x fastest).
///
/// Entry `l` is the estimated reflectivity of pixel `l`. Entries are finite
/// by construction; solver outputs are re-validated before wrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVector<T> {
    values: Vec<Complex<T>>,
}

impl<T: Real> ImageVector<T> {
    /// An all-zero image with `len` pixels.
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    /// Wraps existing values, rejecting NaN or infinite entries.
    pub fn from_values(values: Vec<Complex<T>>) -> Result<Self> {
        if !cvec::all_finite(&values) {
            return Err(Error::NonFinite("image values".into()));
        }
        Ok(Self { values })
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True if the image has no pixels.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pixel values in grid order.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Consumes the image, returning the raw values.
    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Per-pixel magnitudes `|r_l|` in grid order.
    pub fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}
