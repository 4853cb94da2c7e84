//! Joint sparsity-cooperation (JSC) baseline imager.
//!
//! Each cluster is imaged on its own: a phase code estimated from the
//! back-projection absorbs the unknown per-pixel phase, and the coded
//! magnitude image solves the l1-regularized least-squares problem
//!
//! ```text
//! min_r (mu/2) ||y - A Theta r||^2 + ||r||_1
//! ```
//!
//! via FISTA. The per-cluster magnitude images are then fused pixel-wise by
//! maximum. No information flows between clusters during the solves, which
//! is exactly why elevated scatterers survive as disagreeing layover
//! streaks in the fused image - the consensus imager exists to fix that.

use num_complex::Complex;
use rayon::prelude::*;

use crate::cvec;
use crate::error::{Error, Result};
use crate::image::ImageVector;
use crate::measurement::MeasurementSet;
use crate::operator::ClusterOperator;
use crate::scalar::Real;
use crate::solvers::fista::{fista, FistaConfig, FistaReport};
use crate::solvers::prox::shrink;

/// JSC hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JscConfig<T> {
    /// Data-fidelity weight `mu`.
    pub mu: T,
    /// Inner FISTA settings.
    pub fista: FistaConfig<T>,
}

impl<T: Real> Default for JscConfig<T> {
    fn default() -> Self {
        Self {
            mu: T::of(100.0),
            fista: FistaConfig::default(),
        }
    }
}

impl<T: Real> JscConfig<T> {
    fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || self.mu <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "jsc mu must be positive and finite, got {}",
                self.mu
            )));
        }
        Ok(())
    }
}

/// Output of the full JSC pipeline.
#[derive(Debug, Clone)]
pub struct JscOutput<T> {
    /// Pixel-wise maximum of the per-cluster magnitude images.
    pub fused: Vec<T>,
    /// Per-cluster complex solutions, in cluster order.
    pub locals: Vec<ImageVector<T>>,
    /// Per-cluster solver reports, in cluster order.
    pub reports: Vec<FistaReport<T>>,
    /// True when every cluster's FISTA met its tolerance.
    pub converged: bool,
}

/// Estimates the per-pixel phase code from the back-projection:
/// `Theta_l = exp(j angle((A^H y)_l))`, with `Theta_l = 1` where the
/// back-projection is exactly zero.
pub fn estimate_phase<T: Real>(
    op: &ClusterOperator<T>,
    y: &MeasurementSet<T>,
) -> Result<ImageVector<T>> {
    let bp = op.apply_adjoint(y.samples())?;
    ImageVector::from_values(phase_code(&bp))
}

/// Unit-modulus phase code of a complex vector (1 where the input is 0).
pub(crate) fn phase_code<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    v.iter()
        .map(|z| {
            if z.re == T::zero() && z.im == T::zero() {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::from_polar(T::one(), z.arg())
            }
        })
        .collect()
}

/// Solves one cluster's coded l1 problem with FISTA from a zero start.
///
/// Hitting the FISTA iteration cap is reported, not thrown.
pub fn solve_local<T: Real>(
    op: &ClusterOperator<T>,
    y: &MeasurementSet<T>,
    theta: &ImageVector<T>,
    cfg: &JscConfig<T>,
) -> Result<(ImageVector<T>, FistaReport<T>)> {
    cfg.validate()?;
    if y.samples().len() != op.num_samples() {
        return Err(Error::DimensionMismatch(format!(
            "measurements have {} samples, operator expects {}",
            y.samples().len(),
            op.num_samples()
        )));
    }
    if theta.len() != op.num_pixels() {
        return Err(Error::DimensionMismatch(format!(
            "phase code has {} pixels, operator expects {}",
            theta.len(),
            op.num_pixels()
        )));
    }
    let mu = cfg.mu;
    let half = T::of(0.5);
    let code = theta.as_slice();
    let samples = y.samples();

    let residual = |r: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
        let coded: Vec<Complex<T>> = code.iter().zip(r).map(|(t, v)| t * v).collect();
        let projected = op.apply_forward(&coded)?;
        Ok(cvec::sub(&projected, samples))
    };
    let f_val = |r: &[Complex<T>]| -> Result<T> { Ok(mu * half * cvec::norm_sqr(&residual(r)?)) };
    let f_grad = |r: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
        let back = op.apply_adjoint(&residual(r)?)?;
        Ok(code
            .iter()
            .zip(&back)
            .map(|(t, b)| t.conj() * b * mu)
            .collect())
    };
    let g_val = |r: &[Complex<T>]| cvec::norm1(r);
    let prox = |v: &[Complex<T>], step: T| shrink(v, step);

    let x0 = vec![Complex::new(T::zero(), T::zero()); op.num_pixels()];
    let (x, report) = fista(f_grad, f_val, g_val, prox, &x0, &cfg.fista)?;
    Ok((ImageVector::from_values(x)?, report))
}

/// Fuses nonnegative magnitude images by pixel-wise maximum.
pub fn fuse_max<T: Real>(images: &[Vec<T>]) -> Result<Vec<T>> {
    let first = images
        .first()
        .ok_or_else(|| Error::EmptyInput("fusion image list".into()))?;
    for (i, img) in images.iter().enumerate() {
        if img.len() != first.len() {
            return Err(Error::DimensionMismatch(format!(
                "image {i} has {} pixels, image 0 has {}",
                img.len(),
                first.len()
            )));
        }
    }
    let mut fused = first.clone();
    for img in &images[1..] {
        for (f, v) in fused.iter_mut().zip(img) {
            *f = f.max(*v);
        }
    }
    Ok(fused)
}

/// Runs the whole JSC pipeline: phase estimation and local solve per
/// cluster (in parallel), then max fusion of the magnitudes.
pub fn run<T: Real>(
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
    cfg: &JscConfig<T>,
) -> Result<JscOutput<T>> {
    cfg.validate()?;
    if ops.is_empty() {
        return Err(Error::EmptyInput("jsc operator list".into()));
    }
    if ops.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} operators but {} measurement sets",
            ops.len(),
            ys.len()
        )));
    }
    let solved: Vec<(ImageVector<T>, FistaReport<T>)> = ops
        .par_iter()
        .zip(ys.par_iter())
        .map(|(op, y)| {
            let theta = estimate_phase(op, y)?;
            solve_local(op, y, &theta, cfg)
        })
        .collect::<Result<_>>()?;
    let (locals, reports): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
    let magnitudes: Vec<Vec<T>> = locals.iter().map(|img| img.magnitudes()).collect();
    let fused = fuse_max(&magnitudes)?;
    let converged = reports.iter().all(|r| r.converged);
    Ok(JscOutput {
        fused,
        locals,
        reports,
        converged,
    })
}
