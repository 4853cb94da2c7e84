//! Widely-distributed tomographic radar imaging.
//!
//! This crate models a collection of *observation clusters* - groups of
//! sensors sharing an elevation angle and a span of azimuths - that each
//! collect stepped-frequency samples of the same scene. It provides:
//!
//! - the per-cluster forward/adjoint imaging operators over a ground-plane
//!   grid ([`operator`]), in matrix-free and dense reference modes;
//! - a scene simulator with anisotropic point scatterers, elevation-induced
//!   layover, and reproducible complex Gaussian noise ([`sim`]);
//! - self-describing binary containers for datasets and magnitude images
//!   ([`dataset`]);
//! - the independent per-cluster sparse imager with max fusion ([`jsc`]);
//! - the consensus-ADMM imager that couples all clusters through a shared
//!   global image, suppressing layover by consensus ([`cadmm`]);
//! - the underlying kernels: complex soft-thresholding, conjugate
//!   gradients, and FISTA with backtracking ([`solvers`]).
//!
//! Everything numeric is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the `*64` aliases below fix the scalar to `f64`,
//! which is what the on-disk formats and the command-line tools use.
//!
//! # Example
//!
//! Simulate a two-cluster acquisition of a single scatterer and image it
//! by consensus:
//!
//! ```
//! use rtomo::{
//!     cadmm, geometry::ClusterGeometry, geometry::WaveformConfig, grid::SceneGrid,
//!     operator::ClusterOperator, sim,
//! };
//!
//! let waveform = WaveformConfig::with_speed(6.0e8, 3.0e8, 4, 3.0e8)?;
//! let spec = sim::SimulationSpec {
//!     scatterers: vec![sim::PointScatterer::at(0.25, 0.0, 0.0)],
//!     clusters: vec![
//!         ClusterGeometry::uniform(0.5, 0.0, 0.4, 4, waveform)?,
//!         ClusterGeometry::uniform(0.9, 1.6, 0.4, 4, waveform)?,
//!     ],
//!     noise_sigma: 0.0,
//!     rng_seed: 1,
//! };
//! let sets = sim::simulate(&spec)?;
//! let grid = SceneGrid::new(8, 8, -1.0, 1.0, -1.0, 1.0)?;
//! let ops: Vec<_> = sets
//!     .iter()
//!     .map(|s| ClusterOperator::matrix_free(s.geometry().clone(), grid))
//!     .collect();
//! let out = cadmm::run(&ops, &sets, &cadmm::CadmmConfig::default())?;
//! assert!(out.report.converged);
//! # Ok::<(), rtomo::Error>(())
//! ```

pub mod cadmm;
pub mod cvec;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod image;
pub mod jsc;
pub mod measurement;
pub mod operator;
pub mod report;
pub mod scalar;
pub mod sim;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex sample or pixel value.
pub type C64 = num_complex::Complex<f64>;

/// Double-precision scene grid, as used by the on-disk formats.
pub type SceneGrid64 = grid::SceneGrid<f64>;

/// Double-precision waveform configuration.
pub type WaveformConfig64 = geometry::WaveformConfig<f64>;

/// Double-precision cluster geometry.
pub type ClusterGeometry64 = geometry::ClusterGeometry<f64>;

/// Double-precision measurement set.
pub type MeasurementSet64 = measurement::MeasurementSet<f64>;

/// Double-precision complex image.
pub type ImageVector64 = image::ImageVector<f64>;

/// Double-precision cluster operator.
pub type ClusterOperator64 = operator::ClusterOperator<f64>;

/// Double-precision point scatterer.
pub type PointScatterer64 = sim::PointScatterer<f64>;

/// Double-precision simulation spec.
pub type SimulationSpec64 = sim::SimulationSpec<f64>;

/// Double-precision JSC configuration.
pub type JscConfig64 = jsc::JscConfig<f64>;

/// Double-precision consensus configuration.
pub type CadmmConfig64 = cadmm::CadmmConfig<f64>;

/// Double-precision solver report.
pub type SolverReport64 = report::SolverReport<f64>;
