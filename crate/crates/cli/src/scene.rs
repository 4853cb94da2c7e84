//! JSON scene descriptions.
//!
//! Field names carry their units (`_m`, `_deg`, `_hz`) so a spec file can
//! be read without consulting documentation, and angles convert to radians
//! exactly once, at this boundary.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use rtomo::geometry::SPEED_OF_LIGHT;
use rtomo::sim::AzimuthWindow;
use rtomo::{
    ClusterGeometry64, PointScatterer64, SceneGrid64, SimulationSpec64, WaveformConfig64,
};

/// A complete scene description: what is on the ground, who observes it,
/// and how noisy the receivers are.
///
/// Clusters come from the explicit `clusters` list followed by every
/// `rings` entry expanded in order; that combined order fixes the noise
/// streams, so a spec file maps to exactly one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    /// Reconstruction grid to embed in the dataset, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Waveform for clusters that do not override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clusters: Vec<ClusterSpec>,
    /// Shorthand for evenly spaced clusters on a full elevation ring.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rings: Vec<RingSpec>,
    pub scatterers: Vec<ScattererSpec>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_min_m: f64,
    pub x_max_m: f64,
    pub y_min_m: f64,
    pub y_max_m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSpec {
    pub f_center_hz: f64,
    pub bandwidth_hz: f64,
    pub num_freqs: usize,
    /// Propagation speed; defaults to the vacuum speed of light.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_mps: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub phi_deg: f64,
    pub theta_start_deg: f64,
    pub theta_extent_deg: f64,
    pub num_azimuths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub phi_deg: f64,
    pub num_clusters: usize,
    /// Azimuth span of each cluster; defaults to `360 / num_clusters`
    /// (gap-free coverage). Smaller values leave gaps between clusters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_extent_deg: Option<f64>,
    pub num_azimuths: usize,
    /// Azimuth of the first cluster's start.
    #[serde(default)]
    pub theta0_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    pub x_m: f64,
    pub y_m: f64,
    #[serde(default)]
    pub z_m: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase_rad: f64,
    /// Closed azimuth arc `[start, end]` on which the scatterer responds;
    /// omitted means isotropic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_deg: Option<[f64; 2]>,
}

fn one() -> f64 {
    1.0
}

impl WaveformSpec {
    fn to_config(self) -> Result<WaveformConfig64> {
        WaveformConfig64::with_speed(
            self.f_center_hz,
            self.bandwidth_hz,
            self.num_freqs,
            self.c_mps.unwrap_or(SPEED_OF_LIGHT),
        )
        .context("invalid waveform")
    }
}

impl SceneSpec {
    /// Parses a spec file; parse errors carry serde's line/column and
    /// field diagnostics.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read scene spec {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse scene spec {}", path.display()))
    }

    /// Expands the description into simulator input and the optional
    /// embedded grid.
    pub fn build(&self) -> Result<(SimulationSpec64, Option<SceneGrid64>)> {
        let mut clusters = Vec::new();
        for (i, c) in self.clusters.iter().enumerate() {
            let w = self
                .pick_waveform(c.waveform)
                .with_context(|| format!("clusters[{i}]"))?;
            clusters.push(
                ClusterGeometry64::uniform(
                    c.phi_deg.to_radians(),
                    c.theta_start_deg.to_radians(),
                    c.theta_extent_deg.to_radians(),
                    c.num_azimuths,
                    w,
                )
                .with_context(|| format!("clusters[{i}]"))?,
            );
        }
        for (i, ring) in self.rings.iter().enumerate() {
            let w = self
                .pick_waveform(ring.waveform)
                .with_context(|| format!("rings[{i}]"))?;
            if ring.num_clusters == 0 {
                bail!("rings[{i}]: num_clusters must be at least 1");
            }
            let spacing = 360.0 / ring.num_clusters as f64;
            let extent = ring.cluster_extent_deg.unwrap_or(spacing);
            for j in 0..ring.num_clusters {
                let start = ring.theta0_deg + spacing * j as f64;
                clusters.push(
                    ClusterGeometry64::uniform(
                        ring.phi_deg.to_radians(),
                        start.to_radians(),
                        extent.to_radians(),
                        ring.num_azimuths,
                        w,
                    )
                    .with_context(|| format!("rings[{i}] cluster {j}"))?,
                );
            }
        }

        let scatterers = self
            .scatterers
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let window = match s.window_deg {
                    Some([start, end]) => Some(
                        AzimuthWindow::new(start.to_radians(), end.to_radians())
                            .with_context(|| format!("scatterers[{i}]"))?,
                    ),
                    None => None,
                };
                Ok(PointScatterer64 {
                    x: s.x_m,
                    y: s.y_m,
                    z: s.z_m,
                    amplitude: s.amplitude,
                    phase: s.phase_rad,
                    window,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let spec = SimulationSpec64 {
            scatterers,
            clusters,
            noise_sigma: self.noise_sigma,
            rng_seed: self.rng_seed,
        };
        spec.validate().context("invalid scene")?;
        let grid = self.grid.map(|g| self.build_grid(g)).transpose()?;
        Ok((spec, grid))
    }

    /// Ground-plane positions of the true scatterers, in metres.
    pub fn ground_positions(&self) -> Vec<(f64, f64)> {
        self.scatterers.iter().map(|s| (s.x_m, s.y_m)).collect()
    }

    fn pick_waveform(&self, own: Option<WaveformSpec>) -> Result<WaveformConfig64> {
        match own.or(self.waveform) {
            Some(w) => w.to_config(),
            None => bail!("no waveform given (neither per cluster nor top-level)"),
        }
    }

    fn build_grid(&self, g: GridSpec) -> Result<SceneGrid64> {
        SceneGrid64::new(g.nx, g.ny, g.x_min_m, g.x_max_m, g.y_min_m, g.y_max_m)
            .context("invalid grid")
    }
}
