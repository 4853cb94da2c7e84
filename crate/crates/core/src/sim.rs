//! Synthetic scene simulation.
//!
//! Generates the samples every cluster would collect from a set of point
//! scatterers, then adds circular complex Gaussian noise. Scatterers may
//! sit above the ground plane (`z > 0`), which is what produces layover:
//! a cluster at elevation `phi` observing azimuths near `theta` sees an
//! elevated scatterer displaced to the ground position
//! `(x + z tan(phi) cos(theta), y + z tan(phi) sin(theta))`, so different
//! clusters smear the same elevated target to different places.
//!
//! The phase model extends the ground-plane operator with an elevation
//! term: `omega_k * (x cos theta + y sin theta + z tan phi)`, which equals
//! `(4 pi f_k / c) (cos phi (x cos theta + y sin theta) + z sin phi)`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ClusterGeometry;
use crate::measurement::MeasurementSet;
use crate::operator::{accumulate_phase_ramp, omega_step};
use crate::scalar::Real;

/// A closed azimuth arc on which an anisotropic scatterer is visible.
///
/// Angles are normalized to `[0, 2 pi)`; arcs may wrap through zero, so
/// `start > end` is legal and means "from `start` through `2 pi` to `end`".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthWindow<T> {
    start: T,
    end: T,
}

impl<T: Real> AzimuthWindow<T> {
    /// Builds a window from arbitrary finite angles (radians); both are
    /// normalized into `[0, 2 pi)`.
    pub fn new(start: T, end: T) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::NonFinite("azimuth window".into()));
        }
        Ok(Self {
            start: normalize_angle(start),
            end: normalize_angle(end),
        })
    }

    /// Normalized start angle.
    pub fn start(&self) -> T {
        self.start
    }

    /// Normalized end angle.
    pub fn end(&self) -> T {
        self.end
    }

    /// Whether `theta` (any finite angle) falls on the arc, endpoints
    /// included.
    pub fn contains(&self, theta: T) -> bool {
        let t = normalize_angle(theta);
        if self.start <= self.end {
            self.start <= t && t <= self.end
        } else {
            t >= self.start || t <= self.end
        }
    }
}

fn normalize_angle<T: Real>(a: T) -> T {
    let two_pi = T::of(2.0) * T::PI();
    let r = a % two_pi;
    if r < T::zero() {
        r + two_pi
    } else {
        r
    }
}

/// An ideal point scatterer, optionally anisotropic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointScatterer<T> {
    /// Ground-plane position in meters.
    pub x: T,
    /// Ground-plane position in meters.
    pub y: T,
    /// Height above the ground plane in meters.
    pub z: T,
    /// Reflectivity magnitude (nonnegative).
    pub amplitude: T,
    /// Reflectivity phase in radians.
    pub phase: T,
    /// If set, the scatterer only returns energy for azimuths on the arc.
    pub window: Option<AzimuthWindow<T>>,
}

impl<T: Real> PointScatterer<T> {
    /// An isotropic scatterer with unit amplitude and zero phase.
    pub fn at(x: T, y: T, z: T) -> Self {
        Self {
            x,
            y,
            z,
            amplitude: T::one(),
            phase: T::zero(),
            window: None,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        for (name, v) in [
            ("x", self.x),
            ("y", self.y),
            ("z", self.z),
            ("amplitude", self.amplitude),
            ("phase", self.phase),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("scatterer {index} field {name}")));
            }
        }
        if self.amplitude < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "scatterer {index} amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }
}

/// Everything needed to synthesize one multi-cluster acquisition.
#[derive(Debug, Clone)]
pub struct SimulationSpec<T> {
    /// The scene contents, summed coherently in list order.
    pub scatterers: Vec<PointScatterer<T>>,
    /// One geometry per cluster.
    pub clusters: Vec<ClusterGeometry<T>>,
    /// Standard deviation of the circular complex noise: each sample gains
    /// `n` with independent real and imaginary parts of variance
    /// `noise_sigma^2 / 2`, so `E |n|^2 = noise_sigma^2`.
    pub noise_sigma: T,
    /// Seed for the noise generator. Cluster `i` draws from stream `i` of
    /// the seeded generator, so per-cluster noise is independent and the
    /// whole simulation is reproducible.
    pub rng_seed: u64,
}

impl<T: Real> SimulationSpec<T> {
    /// Validates scene contents and noise parameters.
    pub fn validate(&self) -> Result<()> {
        if self.scatterers.is_empty() {
            return Err(Error::EmptyInput("simulation scatterer list".into()));
        }
        if self.clusters.is_empty() {
            return Err(Error::EmptyInput("simulation cluster list".into()));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            s.validate(i)?;
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be nonnegative and finite, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Simulates every cluster in the spec.
///
/// Clusters are simulated in parallel; each owns an independent RNG stream,
/// so the output is identical for any thread count and any rerun with the
/// same spec.
pub fn simulate<T: Real>(spec: &SimulationSpec<T>) -> Result<Vec<MeasurementSet<T>>> {
    spec.validate()?;
    spec.clusters
        .par_iter()
        .enumerate()
        .map(|(i, geometry)| simulate_cluster(spec, geometry, i as u64))
        .collect()
}

fn simulate_cluster<T: Real>(
    spec: &SimulationSpec<T>,
    geometry: &ClusterGeometry<T>,
    stream: u64,
) -> Result<MeasurementSet<T>> {
    let k = geometry.waveform().num_freqs();
    let omega0 = geometry.omegas()[0];
    let domega = omega_step(geometry.omegas());
    let tan_phi = geometry.phi().tan();
    let mut samples = vec![Complex::new(T::zero(), T::zero()); geometry.num_samples()];

    for (m, &theta) in geometry.thetas().iter().enumerate() {
        let (ct, st) = (theta.cos(), theta.sin());
        let block = &mut samples[m * k..(m + 1) * k];
        for s in &spec.scatterers {
            if let Some(w) = &s.window {
                if !w.contains(theta) {
                    continue;
                }
            }
            let u = s.x * ct + s.y * st + s.z * tan_phi;
            let coeff = Complex::from_polar(s.amplitude, s.phase);
            accumulate_phase_ramp(block, coeff, u, omega0, domega);
        }
    }

    if spec.noise_sigma > T::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        rng.set_stream(stream);
        // Per-component scale for a circular complex Gaussian of total
        // variance sigma^2. Draws happen in f64 so the stream is the same
        // bit sequence for every scalar type.
        let scale = spec.noise_sigma.to_f64().expect("finite sigma") / std::f64::consts::SQRT_2;
        for sample in samples.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *sample += Complex::new(T::of(re * scale), T::of(im * scale));
        }
    }

    MeasurementSet::new(geometry.clone(), samples)
}
