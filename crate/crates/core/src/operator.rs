//! Per-cluster forward and adjoint imaging operators.
//!
//! The forward operator `A^i` maps a ground-plane reflectivity image to the
//! samples cluster `i` would collect:
//!
//! ```text
//! y(m, k) = sum_l r_l * exp(+j omega_k (x_l cos theta_m + y_l sin theta_m))
//! ```
//!
//! with `omega_k = 4 pi f_k cos(phi) / c` and samples stacked azimuth-major
//! (`row = m * K + k`). The adjoint flips the sign of the phase.
//!
//! Two evaluation modes are provided. The matrix-free mode synthesizes
//! phases on the fly using the fact that the tones - and hence the
//! wavenumbers - are uniformly spaced: along a fixed look direction the
//! per-tone phasors form a geometric progression, so each (azimuth, pixel)
//! pair costs one sincos pair plus `K` complex multiplies. The dense mode
//! materializes the full matrix with an independent `exp` per entry; it is
//! capped at small grids and exists as a cross-check and reference.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ClusterGeometry;
use crate::grid::SceneGrid;
use crate::scalar::Real;

/// Largest pixel count for which a dense operator may be built.
pub const DENSE_MAX_PIXELS: usize = 4096;

/// Minimum pixels per rayon task in the adjoint, to keep scheduling
/// overhead negligible on small grids.
const PAR_MIN_PIXELS: usize = 32;

/// How the operator evaluates its phase sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    /// Phase-recurrence evaluation; memory stays `O(L + N K)`.
    MatrixFree,
    /// Explicit `(N K) x L` matrix; only for grids up to
    /// [`DENSE_MAX_PIXELS`] pixels.
    Dense,
}

/// The imaging operator of one cluster over one grid.
///
/// Operators are read-only after construction; `apply_*` methods never
/// mutate shared state, so one operator can serve many threads.
#[derive(Debug, Clone)]
pub struct ClusterOperator<T> {
    geometry: ClusterGeometry<T>,
    grid: SceneGrid<T>,
    mode: OperatorMode,
    /// Pixel-center coordinates, precomputed in grid order.
    xs: Vec<T>,
    ys: Vec<T>,
    /// Per-azimuth direction cosines.
    cos_t: Vec<T>,
    sin_t: Vec<T>,
    /// First wavenumber and (uniform) wavenumber spacing.
    omega0: T,
    domega: T,
    /// Row-major `(N K) x L` matrix, dense mode only.
    matrix: Option<Vec<Complex<T>>>,
}

impl<T: Real> ClusterOperator<T> {
    /// Builds an operator in the requested mode.
    pub fn new(geometry: ClusterGeometry<T>, grid: SceneGrid<T>, mode: OperatorMode) -> Result<Self> {
        let num_pixels = grid.num_pixels();
        if mode == OperatorMode::Dense && num_pixels > DENSE_MAX_PIXELS {
            return Err(Error::InvalidParameter(format!(
                "dense mode is capped at {DENSE_MAX_PIXELS} pixels, grid has {num_pixels}"
            )));
        }
        let mut xs = Vec::with_capacity(num_pixels);
        let mut ys = Vec::with_capacity(num_pixels);
        for l in 0..num_pixels {
            let (x, y) = grid.pixel_coords(l)?;
            xs.push(x);
            ys.push(y);
        }
        let cos_t: Vec<T> = geometry.thetas().iter().map(|t| t.cos()).collect();
        let sin_t: Vec<T> = geometry.thetas().iter().map(|t| t.sin()).collect();
        let omega0 = geometry.omegas()[0];
        let domega = omega_step(geometry.omegas());
        let matrix = match mode {
            OperatorMode::MatrixFree => None,
            OperatorMode::Dense => Some(build_dense(&geometry, &xs, &ys, &cos_t, &sin_t)),
        };
        Ok(Self {
            geometry,
            grid,
            mode,
            xs,
            ys,
            cos_t,
            sin_t,
            omega0,
            domega,
            matrix,
        })
    }

    /// Convenience constructor for the matrix-free mode (infallible).
    pub fn matrix_free(geometry: ClusterGeometry<T>, grid: SceneGrid<T>) -> Self {
        Self::new(geometry, grid, OperatorMode::MatrixFree)
            .expect("matrix-free construction cannot fail after type validation")
    }

    /// Convenience constructor for the dense reference mode.
    pub fn dense(geometry: ClusterGeometry<T>, grid: SceneGrid<T>) -> Result<Self> {
        Self::new(geometry, grid, OperatorMode::Dense)
    }

    /// The cluster geometry this operator models.
    pub fn geometry(&self) -> &ClusterGeometry<T> {
        &self.geometry
    }

    /// The reconstruction grid.
    pub fn grid(&self) -> &SceneGrid<T> {
        &self.grid
    }

    /// Evaluation mode.
    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    /// Rows of the operator (`N * K` samples).
    pub fn num_samples(&self) -> usize {
        self.geometry.num_samples()
    }

    /// Columns of the operator (`L` pixels).
    pub fn num_pixels(&self) -> usize {
        self.grid.num_pixels()
    }

    /// The materialized matrix in row-major order, if in dense mode.
    pub fn dense_matrix(&self) -> Option<&[Complex<T>]> {
        self.matrix.as_deref()
    }

    /// Forward map `y = A r`: image to samples.
    ///
    /// Azimuth blocks are computed in parallel; within a block, pixels are
    /// accumulated in index order, so the result does not depend on how the
    /// blocks are scheduled.
    pub fn apply_forward(&self, r: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if r.len() != self.num_pixels() {
            return Err(Error::DimensionMismatch(format!(
                "forward input has {} pixels, operator expects {}",
                r.len(),
                self.num_pixels()
            )));
        }
        let k = self.geometry.waveform().num_freqs();
        match &self.matrix {
            Some(m) => Ok(dense_forward(m, r, self.num_samples())),
            None => {
                let mut out = vec![Complex::new(T::zero(), T::zero()); self.num_samples()];
                out.par_chunks_mut(k)
                    .zip(self.cos_t.par_iter().zip(self.sin_t.par_iter()))
                    .for_each(|(block, (&ct, &st))| {
                        for (l, &rl) in r.iter().enumerate() {
                            if rl.re == T::zero() && rl.im == T::zero() {
                                continue;
                            }
                            let u = self.xs[l] * ct + self.ys[l] * st;
                            accumulate_phase_ramp(block, rl, u, self.omega0, self.domega);
                        }
                    });
                Ok(out)
            }
        }
    }

    /// Adjoint map `img = A^H y`: samples to image (back-projection).
    ///
    /// Pixels are computed in parallel; within a pixel, samples are
    /// accumulated azimuth-major, so the result does not depend on
    /// scheduling.
    pub fn apply_adjoint(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if y.len() != self.num_samples() {
            return Err(Error::DimensionMismatch(format!(
                "adjoint input has {} samples, operator expects {}",
                y.len(),
                self.num_samples()
            )));
        }
        let k = self.geometry.waveform().num_freqs();
        match &self.matrix {
            Some(m) => Ok(dense_adjoint(m, y, self.num_pixels())),
            None => Ok((0..self.num_pixels())
                .into_par_iter()
                .with_min_len(PAR_MIN_PIXELS)
                .map(|l| {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for m in 0..self.cos_t.len() {
                        let u = self.xs[l] * self.cos_t[m] + self.ys[l] * self.sin_t[m];
                        acc += dot_phase_ramp(&y[m * k..(m + 1) * k], u, self.omega0, self.domega);
                    }
                    acc
                })
                .collect()),
        }
    }

    /// Regularized Gram map `G x = mu Theta^H A^H A Theta x + beta x`.
    ///
    /// `theta` is a per-pixel unit-modulus phase code; entries whose modulus
    /// strays from 1 by more than a small tolerance are rejected, as are
    /// non-positive `mu` or `beta`. `G` is Hermitian positive definite, which
    /// is what lets conjugate gradients solve against it.
    pub fn apply_gram(
        &self,
        theta: &[Complex<T>],
        mu: T,
        beta: T,
        x: &[Complex<T>],
    ) -> Result<Vec<Complex<T>>> {
        if theta.len() != self.num_pixels() || x.len() != self.num_pixels() {
            return Err(Error::DimensionMismatch(format!(
                "gram inputs have {} / {} pixels, operator expects {}",
                theta.len(),
                x.len(),
                self.num_pixels()
            )));
        }
        if !(mu.is_finite() && mu > T::zero()) || !(beta.is_finite() && beta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "gram weights must be positive and finite, got mu = {mu}, beta = {beta}"
            )));
        }
        // 1e-9 is far above f64 roundoff but strict enough to catch any
        // non-phase input; widen to a few ulps for narrower scalars.
        let tol = T::of(1.0e-9).max(T::epsilon() * T::of(16.0));
        if theta
            .iter()
            .any(|t| (t.norm() - T::one()).abs() > tol)
        {
            return Err(Error::InvalidParameter(
                "gram phase code must have unit-modulus entries".into(),
            ));
        }
        let coded: Vec<Complex<T>> = theta.iter().zip(x).map(|(t, v)| t * v).collect();
        let projected = self.apply_forward(&coded)?;
        let back = self.apply_adjoint(&projected)?;
        Ok(theta
            .iter()
            .zip(back.iter().zip(x))
            .map(|(t, (b, v))| t.conj() * b * mu + v * beta)
            .collect())
    }
}

/// Uniform spacing of the wavenumber ladder (0 for a single tone).
///
/// Tones are uniformly spaced by construction, so the spacing derived from
/// the endpoints agrees with every interior gap to rounding error.
pub(crate) fn omega_step<T: Real>(omegas: &[T]) -> T {
    if omegas.len() < 2 {
        T::zero()
    } else {
        (omegas[omegas.len() - 1] - omegas[0]) / T::of((omegas.len() - 1) as f64)
    }
}

/// Adds `coeff * exp(+j (omega0 + k domega) u)` to `acc[k]` for each tone.
///
/// Shared by the matrix-free forward map and the scene simulator so that
/// both sides of the pipeline synthesize identical phase ramps.
pub(crate) fn accumulate_phase_ramp<T: Real>(
    acc: &mut [Complex<T>],
    coeff: Complex<T>,
    u: T,
    omega0: T,
    domega: T,
) {
    let mut ph = Complex::from_polar(T::one(), omega0 * u);
    let step = Complex::from_polar(T::one(), domega * u);
    for a in acc.iter_mut() {
        *a += coeff * ph;
        ph = ph * step;
    }
}

/// Returns `sum_k y[k] * exp(-j (omega0 + k domega) u)`.
fn dot_phase_ramp<T: Real>(y: &[Complex<T>], u: T, omega0: T, domega: T) -> Complex<T> {
    let mut ph = Complex::from_polar(T::one(), -(omega0 * u));
    let step = Complex::from_polar(T::one(), -(domega * u));
    let mut acc = Complex::new(T::zero(), T::zero());
    for yk in y {
        acc += yk * ph;
        ph = ph * step;
    }
    acc
}

/// Materializes the operator matrix with one independent `exp` per entry.
fn build_dense<T: Real>(
    geometry: &ClusterGeometry<T>,
    xs: &[T],
    ys: &[T],
    cos_t: &[T],
    sin_t: &[T],
) -> Vec<Complex<T>> {
    let omegas = geometry.omegas();
    let k = omegas.len();
    let l_count = xs.len();
    let mut m = Vec::with_capacity(geometry.num_samples() * l_count);
    for mi in 0..cos_t.len() {
        for &omega in omegas.iter().take(k) {
            for l in 0..l_count {
                let u = xs[l] * cos_t[mi] + ys[l] * sin_t[mi];
                m.push(Complex::from_polar(T::one(), omega * u));
            }
        }
    }
    m
}

fn dense_forward<T: Real>(m: &[Complex<T>], r: &[Complex<T>], rows: usize) -> Vec<Complex<T>> {
    let l_count = r.len();
    let mut out = Vec::with_capacity(rows);
    for row in 0..rows {
        let mrow = &m[row * l_count..(row + 1) * l_count];
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, rl) in mrow.iter().zip(r) {
            acc += e * rl;
        }
        out.push(acc);
    }
    out
}

fn dense_adjoint<T: Real>(m: &[Complex<T>], y: &[Complex<T>], l_count: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); l_count];
    for (row, &yr) in y.iter().enumerate() {
        let mrow = &m[row * l_count..(row + 1) * l_count];
        for (o, e) in out.iter_mut().zip(mrow) {
            *o += e.conj() * yr;
        }
    }
    out
}
