//! Acquisition geometry: waveform grids and observation clusters.
//!
//! A *cluster* is a group of sensors sharing one elevation angle `phi` and a
//! contiguous span of azimuth angles `theta_m`. Each azimuth transmits the
//! same stepped-frequency waveform, so a cluster collects `N * K` complex
//! samples (`N` azimuths times `K` frequencies).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Speed of light in vacuum, meters per second.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Stepped-frequency waveform: `K` tones spaced uniformly across a band.
///
/// For `K > 1` the tones are `f_k = f_min + k * bandwidth / (K - 1)` with
/// `f_min = f_center - bandwidth / 2`, so `f_0 = f_min` and
/// `f_{K-1} = f_min + bandwidth`. A single-tone waveform (`K = 1`) sits at
/// `f_center` and may have zero bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformConfig<T> {
    f_center: T,
    bandwidth: T,
    num_freqs: usize,
    c: T,
}

impl<T: Real> WaveformConfig<T> {
    /// Builds a waveform with the physical speed of light.
    pub fn new(f_center: T, bandwidth: T, num_freqs: usize) -> Result<Self> {
        Self::with_speed(f_center, bandwidth, num_freqs, T::of(SPEED_OF_LIGHT))
    }

    /// Builds a waveform with an explicit propagation speed (useful for
    /// textbook-scaled examples).
    pub fn with_speed(f_center: T, bandwidth: T, num_freqs: usize, c: T) -> Result<Self> {
        if !(f_center.is_finite() && bandwidth.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite("waveform parameters".into()));
        }
        if f_center <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "center frequency must be positive, got {f_center}"
            )));
        }
        if c <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "propagation speed must be positive, got {c}"
            )));
        }
        if num_freqs == 0 {
            return Err(Error::InvalidParameter(
                "waveform needs at least one frequency".into(),
            ));
        }
        if bandwidth < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be nonnegative, got {bandwidth}"
            )));
        }
        if num_freqs > 1 && bandwidth == T::zero() {
            return Err(Error::InvalidParameter(
                "multi-tone waveform needs positive bandwidth".into(),
            ));
        }
        let two = T::of(2.0);
        if num_freqs > 1 && f_center - bandwidth / two <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "lowest tone must be positive: f_center {f_center}, bandwidth {bandwidth}"
            )));
        }
        Ok(Self {
            f_center,
            bandwidth,
            num_freqs,
            c,
        })
    }

    /// Center frequency in Hz.
    pub fn f_center(&self) -> T {
        self.f_center
    }

    /// Total swept bandwidth in Hz.
    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// Number of tones `K`.
    pub fn num_freqs(&self) -> usize {
        self.num_freqs
    }

    /// Propagation speed in m/s.
    pub fn c(&self) -> T {
        self.c
    }

    /// The tone frequencies `f_0 < f_1 < ... < f_{K-1}` in Hz.
    pub fn frequencies(&self) -> Vec<T> {
        if self.num_freqs == 1 {
            return vec![self.f_center];
        }
        let f_min = self.f_center - self.bandwidth / T::of(2.0);
        let step = self.bandwidth / T::of((self.num_freqs - 1) as f64);
        (0..self.num_freqs)
            .map(|k| f_min + T::of(k as f64) * step)
            .collect()
    }
}

/// Angular wavenumber `omega = 4 pi f cos(phi) / c` in rad/m.
///
/// This is the round-trip spatial frequency that a tone at `f` Hz projects
/// onto the ground plane when observed from elevation `phi`. The expression
/// is evaluated left to right exactly as written, so recomputing it from
/// stored `(f, phi, c)` reproduces stored wavenumbers bit for bit.
pub fn wavenumber<T: Real>(f: T, phi: T, c: T) -> T {
    T::of(4.0) * T::PI() * f * phi.cos() / c
}

/// One observation cluster: an elevation angle, a list of azimuth angles,
/// the waveform, and the derived per-tone ground-plane wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGeometry<T> {
    phi: T,
    thetas: Vec<T>,
    waveform: WaveformConfig<T>,
    omegas: Vec<T>,
}

impl<T: Real> ClusterGeometry<T> {
    /// Builds a cluster from an explicit azimuth list.
    ///
    /// Requires `0 <= phi < pi/2` and at least one finite azimuth. Azimuths
    /// are kept in the given order; sample index `m * K + k` pairs azimuth
    /// `m` with tone `k`.
    pub fn new(phi: T, thetas: Vec<T>, waveform: WaveformConfig<T>) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("elevation angle".into()));
        }
        let half_pi = T::FRAC_PI_2();
        if phi < T::zero() || phi >= half_pi {
            return Err(Error::InvalidParameter(format!(
                "elevation must lie in [0, pi/2), got {phi} rad"
            )));
        }
        if thetas.is_empty() {
            return Err(Error::EmptyInput("cluster azimuth list".into()));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("cluster azimuth list".into()));
        }
        let omegas = waveform
            .frequencies()
            .into_iter()
            .map(|f| wavenumber(f, phi, waveform.c()))
            .collect();
        Ok(Self {
            phi,
            thetas,
            waveform,
            omegas,
        })
    }

    /// Builds a cluster whose `n` azimuths are uniformly spaced on the
    /// half-open arc `[theta_start, theta_start + theta_extent)`:
    /// `theta_m = theta_start + m * theta_extent / n`.
    pub fn uniform(
        phi: T,
        theta_start: T,
        theta_extent: T,
        n: usize,
        waveform: WaveformConfig<T>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "cluster needs at least one azimuth".into(),
            ));
        }
        if !(theta_start.is_finite() && theta_extent.is_finite()) {
            return Err(Error::NonFinite("cluster azimuth span".into()));
        }
        if theta_extent <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "azimuth extent must be positive, got {theta_extent} rad"
            )));
        }
        let step = theta_extent / T::of(n as f64);
        let thetas = (0..n)
            .map(|m| theta_start + T::of(m as f64) * step)
            .collect();
        Self::new(phi, thetas, waveform)
    }

    /// Elevation angle in radians.
    pub fn phi(&self) -> T {
        self.phi
    }

    /// Azimuth angles in radians, one per pulse.
    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    /// The waveform shared by all azimuths.
    pub fn waveform(&self) -> &WaveformConfig<T> {
        &self.waveform
    }

    /// Ground-plane wavenumbers `omega_k`, one per tone, in rad/m.
    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    /// Number of azimuths `N`.
    pub fn num_azimuths(&self) -> usize {
        self.thetas.len()
    }

    /// Total sample count `N * K` for this cluster.
    pub fn num_samples(&self) -> usize {
        self.thetas.len() * self.waveform.num_freqs()
    }
}
