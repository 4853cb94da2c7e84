//! Consensus-ADMM fusion imager.
//!
//! All clusters share one global image `g` and the solver alternates three
//! steps on the augmented Lagrangian of
//!
//! ```text
//! min   sum_i [ (mu/2) ||y^i - A^i Theta^i r^i||^2 + ||g||_1 ]
//! s.t.  r^i = g  for every cluster i
//! ```
//!
//! - the r-update solves, independently per cluster,
//!   `(mu Theta^H A^H A Theta + beta I) r = mu Theta^H A^H y - sigma + beta g`
//!   with warm-started conjugate gradients;
//! - the g-update minimizes `||g||_1 + h(g)` with
//!   `h(g) = (1/I) sum_i [ (beta/2) ||r^i - g||^2 - Re<sigma^i, g> ]`,
//!   by default with warm-started FISTA (a closed-form mode exists as a
//!   cross-check, since h is an isotropic quadratic);
//! - the multiplier update is `sigma^i += beta (r^i - g)`.
//!
//! Consensus forces every cluster to explain the same ground-plane image,
//! which is what suppresses the inconsistent layover responses that
//! survive independent per-cluster imaging.

use num_complex::Complex;
use rayon::prelude::*;

use crate::cvec;
use crate::error::{Error, Result};
use crate::image::ImageVector;
use crate::jsc::phase_code;
use crate::measurement::MeasurementSet;
use crate::operator::ClusterOperator;
use crate::report::{IterationRecord, SolverReport};
use crate::scalar::Real;
use crate::solvers::cg::{cg_solve, CgConfig};
use crate::solvers::fista::{fista, FistaConfig};
use crate::solvers::prox::shrink;

/// How the g-update is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GUpdateMode {
    /// Warm-started FISTA on `||g||_1 + h(g)` (the default).
    #[default]
    Fista,
    /// Direct evaluation of `soft_threshold(mean(r) + mean(sigma)/beta, 1/beta)`,
    /// the exact minimizer; used to cross-check the iterative path.
    ClosedForm,
}

/// Consensus solver hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadmmConfig<T> {
    /// Data-fidelity weight `mu`.
    pub mu: T,
    /// Consensus penalty `beta`.
    pub beta: T,
    /// Stopping tolerance on both residual norms.
    pub eps: T,
    /// Outer iteration cap.
    pub t_max: usize,
    /// Inner conjugate-gradient settings for the r-update.
    pub cg: CgConfig<T>,
    /// Inner FISTA settings for the g-update.
    pub fista: FistaConfig<T>,
    /// g-update strategy.
    pub g_update: GUpdateMode,
}

impl<T: Real> Default for CadmmConfig<T> {
    fn default() -> Self {
        Self {
            mu: T::of(100.0),
            beta: T::of(50.0),
            eps: T::of(0.01),
            t_max: 100,
            cg: CgConfig::default(),
            fista: FistaConfig {
                max_iters: 200,
                rel_tol: T::of(1.0e-12),
                ..FistaConfig::default()
            },
            g_update: GUpdateMode::Fista,
        }
    }
}

impl<T: Real> CadmmConfig<T> {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("beta", self.beta), ("eps", self.eps)] {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "cadmm {name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.t_max == 0 {
            return Err(Error::InvalidParameter("cadmm needs t_max >= 1".into()));
        }
        Ok(())
    }
}

/// Mutable state of the consensus iteration.
#[derive(Debug, Clone)]
pub struct CadmmState<T> {
    /// Per-cluster local images `r^i`.
    pub r: Vec<ImageVector<T>>,
    /// Global consensus image `g_t`.
    pub g: ImageVector<T>,
    /// Previous consensus image `g_{t-1}` (for the dual residual).
    pub g_prev: ImageVector<T>,
    /// Per-cluster scaled multipliers `sigma^i`.
    pub sigma: Vec<ImageVector<T>>,
    /// Completed outer iterations.
    pub t: usize,
    /// Convergence history, one record per completed iteration.
    pub report: SolverReport<T>,
}

/// Final result of a consensus run.
#[derive(Debug, Clone)]
pub struct CadmmOutput<T> {
    /// The consensus image `g`.
    pub global: ImageVector<T>,
    /// Per-cluster local images at termination.
    pub locals: Vec<ImageVector<T>>,
    /// Convergence history; `report.converged` distinguishes tolerance
    /// stops from iteration-cap stops.
    pub report: SolverReport<T>,
}

/// Initializes the consensus state from the measurements.
///
/// Back-projects each cluster once: `r^i_0 = |A^{iH} y^i|` (as a complex
/// image with zero imaginary part), the phase codes `Theta^i` take the
/// back-projection angles, and `g_0` and all multipliers start at zero.
/// Returns the state together with the per-cluster phase codes.
pub fn init_state<T: Real>(
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
) -> Result<(CadmmState<T>, Vec<ImageVector<T>>)> {
    check_problem(ops, ys)?;
    let num_pixels = ops[0].num_pixels();
    let back: Vec<Vec<Complex<T>>> = ops
        .par_iter()
        .zip(ys.par_iter())
        .map(|(op, y)| op.apply_adjoint(y.samples()))
        .collect::<Result<_>>()?;
    let mut r = Vec::with_capacity(back.len());
    let mut thetas = Vec::with_capacity(back.len());
    for bp in &back {
        let mags: Vec<Complex<T>> = bp
            .iter()
            .map(|z| Complex::new(z.norm(), T::zero()))
            .collect();
        r.push(ImageVector::from_values(mags)?);
        thetas.push(ImageVector::from_values(phase_code(bp))?);
    }
    let state = CadmmState {
        r,
        g: ImageVector::zeros(num_pixels),
        g_prev: ImageVector::zeros(num_pixels),
        sigma: vec![ImageVector::zeros(num_pixels); ops.len()],
        t: 0,
        report: SolverReport::new(),
    };
    Ok((state, thetas))
}

/// One r-update: solves every cluster's regularized normal equations with
/// conjugate gradients, warm-started from the current `r^i`.
///
/// Clusters run in parallel and are collected in cluster order, so the
/// result is independent of scheduling. Returns the new local images and
/// the CG iterations summed over clusters.
pub fn update_r<T: Real>(
    state: &CadmmState<T>,
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
    thetas: &[ImageVector<T>],
    cfg: &CadmmConfig<T>,
) -> Result<(Vec<ImageVector<T>>, usize)> {
    cfg.validate()?;
    check_problem(ops, ys)?;
    let rhs_base = rhs_base(ops, ys, thetas, cfg.mu)?;
    update_r_with(state, ops, thetas, &rhs_base, cfg)
}

/// Precomputes the iteration-invariant part of the r-update right-hand
/// side, `mu Theta^H (A^H y)`, once per run.
fn rhs_base<T: Real>(
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
    thetas: &[ImageVector<T>],
    mu: T,
) -> Result<Vec<Vec<Complex<T>>>> {
    if thetas.len() != ops.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} phase codes for {} clusters",
            thetas.len(),
            ops.len()
        )));
    }
    ops.par_iter()
        .zip(ys.par_iter().zip(thetas.par_iter()))
        .map(|(op, (y, theta))| {
            let bp = op.apply_adjoint(y.samples())?;
            Ok(theta
                .as_slice()
                .iter()
                .zip(&bp)
                .map(|(t, b)| t.conj() * b * mu)
                .collect())
        })
        .collect()
}

fn update_r_with<T: Real>(
    state: &CadmmState<T>,
    ops: &[ClusterOperator<T>],
    thetas: &[ImageVector<T>],
    rhs_base: &[Vec<Complex<T>>],
    cfg: &CadmmConfig<T>,
) -> Result<(Vec<ImageVector<T>>, usize)> {
    let g = state.g.as_slice();
    let beta = cfg.beta;
    let solved: Vec<(ImageVector<T>, usize)> = ops
        .par_iter()
        .enumerate()
        .map(|(i, op)| {
            let rhs: Vec<Complex<T>> = rhs_base[i]
                .iter()
                .zip(state.sigma[i].as_slice().iter().zip(g))
                .map(|(base, (s, gl))| base - s + gl * beta)
                .collect();
            let theta = thetas[i].as_slice();
            let outcome = cg_solve(
                |x| op.apply_gram(theta, cfg.mu, beta, x),
                &rhs,
                Some(state.r[i].as_slice()),
                &cfg.cg,
            )?;
            Ok((ImageVector::from_values(outcome.x)?, outcome.iterations))
        })
        .collect::<Result<_>>()?;
    let mut iters = 0;
    let mut r = Vec::with_capacity(solved.len());
    for (img, it) in solved {
        iters += it;
        r.push(img);
    }
    Ok((r, iters))
}

/// One g-update: minimizes `||g||_1 + h(g)` given the freshly updated
/// local images in `state.r` and the current multipliers.
///
/// Returns the new consensus image and the inner iterations spent (zero
/// for the closed form).
pub fn update_g<T: Real>(state: &CadmmState<T>, cfg: &CadmmConfig<T>) -> Result<(ImageVector<T>, usize)> {
    cfg.validate()?;
    let num_pixels = state.g.len();
    let count = T::of(state.r.len() as f64);
    let beta = cfg.beta;

    // Cluster means in fixed cluster order.
    let mut r_mean = vec![Complex::new(T::zero(), T::zero()); num_pixels];
    let mut sigma_mean = vec![Complex::new(T::zero(), T::zero()); num_pixels];
    for (ri, si) in state.r.iter().zip(&state.sigma) {
        for l in 0..num_pixels {
            r_mean[l] += ri.as_slice()[l];
            sigma_mean[l] += si.as_slice()[l];
        }
    }
    for l in 0..num_pixels {
        r_mean[l] = r_mean[l] / count;
        sigma_mean[l] = sigma_mean[l] / count;
    }

    match cfg.g_update {
        GUpdateMode::ClosedForm => {
            // h(g) = (beta/2) ||g - (r_mean + sigma_mean/beta)||^2 + const,
            // so the minimizer of ||g||_1 + h is one soft threshold.
            let target: Vec<Complex<T>> = r_mean
                .iter()
                .zip(&sigma_mean)
                .map(|(r, s)| r + s / beta)
                .collect();
            Ok((
                ImageVector::from_values(shrink(&target, T::one() / beta))?,
                0,
            ))
        }
        GUpdateMode::Fista => {
            let half = T::of(0.5);
            let f_val = |g: &[Complex<T>]| -> Result<T> {
                // Evaluated honestly over clusters, not through the
                // completed square, so the iterative path exercises the
                // consensus objective in its original form.
                let mut acc = T::zero();
                for (ri, si) in state.r.iter().zip(&state.sigma) {
                    let diff = cvec::sub(ri.as_slice(), g);
                    acc += beta * half * cvec::norm_sqr(&diff) - cvec::dot_re(si.as_slice(), g);
                }
                Ok(acc / count)
            };
            let f_grad = |g: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
                Ok(g.iter()
                    .zip(r_mean.iter().zip(&sigma_mean))
                    .map(|(gl, (rl, sl))| (gl - rl) * beta - sl)
                    .collect())
            };
            let g_val = |g: &[Complex<T>]| cvec::norm1(g);
            let prox = |v: &[Complex<T>], step: T| shrink(v, step);
            let (g_new, report) = fista(f_grad, f_val, g_val, prox, state.g.as_slice(), &cfg.fista)?;
            Ok((ImageVector::from_values(g_new)?, report.iterations))
        }
    }
}

/// One multiplier update: `sigma^i += beta (r^i - g)`, elementwise, using
/// the freshly updated `state.r` and `state.g`.
pub fn update_sigma<T: Real>(
    state: &CadmmState<T>,
    cfg: &CadmmConfig<T>,
) -> Result<Vec<ImageVector<T>>> {
    cfg.validate()?;
    let g = state.g.as_slice();
    state
        .r
        .iter()
        .zip(&state.sigma)
        .map(|(ri, si)| {
            let next: Vec<Complex<T>> = si
                .as_slice()
                .iter()
                .zip(ri.as_slice().iter().zip(g))
                .map(|(s, (r, gl))| s + (r - gl) * cfg.beta)
                .collect();
            ImageVector::from_values(next)
        })
        .collect()
}

/// Residual norms `(||eta_pri||, ||eta_dual||)` of the current state.
///
/// The primal residual is defined as the *vector sum*
/// `sum_i (r^i - g)`, accumulated in cluster order - not the stacked
/// per-cluster residual, so symmetric disagreements can cancel. The dual
/// residual is `g_t - g_{t-1}`.
pub fn residuals<T: Real>(state: &CadmmState<T>) -> (T, T) {
    let g = state.g.as_slice();
    let mut pri = vec![Complex::new(T::zero(), T::zero()); g.len()];
    for ri in &state.r {
        for (p, (r, gl)) in pri.iter_mut().zip(ri.as_slice().iter().zip(g)) {
            *p += r - gl;
        }
    }
    let eta_pri = cvec::norm2(&pri);
    let eta_dual = cvec::norm2(&cvec::sub(g, state.g_prev.as_slice()));
    (eta_pri, eta_dual)
}

/// Augmented Lagrangian value at the given point.
///
/// The shared regularizer `||g||_1` is counted once per cluster (the
/// `1/I` inside the g-step compensates), matching the per-cluster split
/// the solver actually iterates on.
pub fn augmented_lagrangian<T: Real>(
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
    thetas: &[ImageVector<T>],
    r: &[ImageVector<T>],
    g: &ImageVector<T>,
    sigma: &[ImageVector<T>],
    mu: T,
    beta: T,
) -> Result<T> {
    let half = T::of(0.5);
    let g_l1 = cvec::norm1(g.as_slice());
    let terms: Vec<T> = ops
        .par_iter()
        .enumerate()
        .map(|(i, op)| {
            let coded: Vec<Complex<T>> = thetas[i]
                .as_slice()
                .iter()
                .zip(r[i].as_slice())
                .map(|(t, v)| t * v)
                .collect();
            let projected = op.apply_forward(&coded)?;
            let misfit = cvec::sub(&projected, ys[i].samples());
            let gap = cvec::sub(r[i].as_slice(), g.as_slice());
            Ok(mu * half * cvec::norm_sqr(&misfit)
                + g_l1
                + cvec::dot_re(sigma[i].as_slice(), &gap)
                + beta * half * cvec::norm_sqr(&gap))
        })
        .collect::<Result<_>>()?;
    // Sum in cluster order for reproducibility.
    Ok(terms.into_iter().fold(T::zero(), |a, b| a + b))
}

/// Runs the full consensus iteration until both residual norms drop below
/// `eps` or `t_max` iterations complete.
///
/// Nonconvergence at the cap is reported in the [`SolverReport`], not
/// raised: the caller still receives the final images and history.
pub fn run<T: Real>(
    ops: &[ClusterOperator<T>],
    ys: &[MeasurementSet<T>],
    cfg: &CadmmConfig<T>,
) -> Result<CadmmOutput<T>> {
    cfg.validate()?;
    let (mut state, thetas) = init_state(ops, ys)?;
    let base = rhs_base(ops, ys, &thetas, cfg.mu)?;

    for t in 1..=cfg.t_max {
        let (r_next, cg_iters) = update_r_with(&state, ops, &thetas, &base, cfg)?;
        state.r = r_next;
        let (g_next, fista_iters) = update_g(&state, cfg)?;
        state.g_prev = std::mem::replace(&mut state.g, g_next);
        state.sigma = update_sigma(&state, cfg)?;
        state.t = t;

        let (eta_pri, eta_dual) = residuals(&state);
        let objective = augmented_lagrangian(
            ops,
            ys,
            &thetas,
            &state.r,
            &state.g,
            &state.sigma,
            cfg.mu,
            cfg.beta,
        )?;
        state.report.records.push(IterationRecord {
            t,
            eta_pri,
            eta_dual,
            objective,
            cg_iters,
            fista_iters,
        });
        if eta_pri < cfg.eps && eta_dual < cfg.eps {
            state.report.converged = true;
            break;
        }
    }

    Ok(CadmmOutput {
        global: state.g,
        locals: state.r,
        report: state.report,
    })
}

fn check_problem<T: Real>(ops: &[ClusterOperator<T>], ys: &[MeasurementSet<T>]) -> Result<()> {
    if ops.is_empty() {
        return Err(Error::EmptyInput("cluster operator list".into()));
    }
    if ops.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} operators but {} measurement sets",
            ops.len(),
            ys.len()
        )));
    }
    let num_pixels = ops[0].num_pixels();
    for (i, (op, y)) in ops.iter().zip(ys).enumerate() {
        if op.num_pixels() != num_pixels {
            return Err(Error::DimensionMismatch(format!(
                "cluster {i} images {} pixels, cluster 0 images {num_pixels}",
                op.num_pixels()
            )));
        }
        if y.samples().len() != op.num_samples() {
            return Err(Error::DimensionMismatch(format!(
                "cluster {i} has {} samples, its operator expects {}",
                y.samples().len(),
                op.num_samples()
            )));
        }
    }
    Ok(())
}
