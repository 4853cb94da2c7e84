//! Per-cluster measurement vectors.

use num_complex::Complex;

use crate::cvec;
use crate::error::{Error, Result};
use crate::geometry::ClusterGeometry;
use crate::scalar::Real;

/// The complex samples collected by one cluster, paired with the geometry
/// that produced them.
///
/// Samples are stacked azimuth-major: the sample for azimuth `m` and tone
/// `k` lives at index `m * K + k`, matching the forward operator's row
/// ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet<T> {
    geometry: ClusterGeometry<T>,
    samples: Vec<Complex<T>>,
}

impl<T: Real> MeasurementSet<T> {
    /// Pairs samples with their geometry, validating length and finiteness.
    pub fn new(geometry: ClusterGeometry<T>, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() != geometry.num_samples() {
            return Err(Error::DimensionMismatch(format!(
                "cluster expects {} samples ({} azimuths x {} tones), got {}",
                geometry.num_samples(),
                geometry.num_azimuths(),
                geometry.waveform().num_freqs(),
                samples.len()
            )));
        }
        if !cvec::all_finite(&samples) {
            return Err(Error::NonFinite("measurement samples".into()));
        }
        Ok(Self { geometry, samples })
    }

    /// The acquisition geometry for this cluster.
    pub fn geometry(&self) -> &ClusterGeometry<T> {
        &self.geometry
    }

    /// Samples in stacking order (azimuth-major).
    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    /// Flat index of the sample for azimuth `m`, tone `k`.
    pub fn sample_index(&self, m: usize, k: usize) -> Result<usize> {
        let n = self.geometry.num_azimuths();
        let kk = self.geometry.waveform().num_freqs();
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, len: n });
        }
        if k >= kk {
            return Err(Error::IndexOutOfRange { index: k, len: kk });
        }
        Ok(m * kk + k)
    }

    /// Splits the set back into geometry and samples.
    pub fn into_parts(self) -> (ClusterGeometry<T>, Vec<Complex<T>>) {
        (self.geometry, self.samples)
    }
}
