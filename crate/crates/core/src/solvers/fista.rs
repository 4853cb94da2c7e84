//! FISTA with backtracking line search for composite objectives
//! `F(x) = f(x) + g(x)` with smooth `f` and prox-friendly `g`.

use num_complex::Complex;

use crate::cvec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// FISTA parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaConfig<T> {
    /// Initial curvature estimate for the backtracking search.
    pub l0: T,
    /// Backtracking growth factor (`L <- eta * L` on rejection).
    pub eta: T,
    /// Hard iteration cap.
    pub max_iters: usize,
    /// Stop when `|F_k - F_{k-1}| <= rel_tol * max(1, |F_k|)`.
    pub rel_tol: T,
}

impl<T: Real> Default for FistaConfig<T> {
    fn default() -> Self {
        Self {
            l0: T::one(),
            eta: T::of(2.0),
            max_iters: 500,
            rel_tol: T::of(1.0e-9),
        }
    }
}

impl<T: Real> FistaConfig<T> {
    fn validate(&self) -> Result<()> {
        if !self.l0.is_finite() || self.l0 <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "fista l0 must be positive and finite, got {}",
                self.l0
            )));
        }
        if !self.eta.is_finite() || self.eta <= T::one() {
            return Err(Error::InvalidParameter(format!(
                "fista eta must exceed 1, got {}",
                self.eta
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("fista needs max_iters >= 1".into()));
        }
        if !self.rel_tol.is_finite() || self.rel_tol < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "fista rel_tol must be nonnegative and finite, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Convergence record of a FISTA run.
#[derive(Debug, Clone)]
pub struct FistaReport<T> {
    /// Accepted iterations performed.
    pub iterations: usize,
    /// Whether the objective-change tolerance was met.
    pub converged: bool,
    /// Objective values `F(x_k)`, starting with `F(x_0)`.
    pub objectives: Vec<T>,
}

/// Minimizes `f(x) + g(x)` from `x0`, where `f` is smooth (given by value
/// and gradient) and `g` enters through its value and proximal operator
/// `prox(v, step) = argmin_x g(x) + ||x - v||^2 / (2 step)`.
///
/// The step size is found by backtracking (Beck and Teboulle): the local
/// curvature estimate `L` doubles until the quadratic upper model of `f`
/// at the extrapolated point holds, so no Lipschitz constant is needed up
/// front. Gradients follow the Wirtinger convention for real objectives of
/// complex vectors: `f(x + d) ~ f(x) + Re<grad f(x), d>`.
///
/// FISTA is not monotone, so the lowest-objective accepted iterate is
/// tracked and returned; the result never has a worse objective than `x0`.
pub fn fista<T, FG, FV, GV, PX>(
    f_grad: FG,
    f_val: FV,
    g_val: GV,
    prox: PX,
    x0: &[Complex<T>],
    cfg: &FistaConfig<T>,
) -> Result<(Vec<Complex<T>>, FistaReport<T>)>
where
    T: Real,
    FG: Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
    FV: Fn(&[Complex<T>]) -> Result<T>,
    GV: Fn(&[Complex<T>]) -> T,
    PX: Fn(&[Complex<T>], T) -> Vec<Complex<T>>,
{
    cfg.validate()?;
    if !cvec::all_finite(x0) {
        return Err(Error::NonFinite("fista start point".into()));
    }

    let f0 = checked(f_val(x0)?, "fista objective")?;
    let mut objective_prev = f0 + g_val(x0);
    if !objective_prev.is_finite() {
        return Err(Error::NonFinite("fista objective".into()));
    }
    let mut objectives = vec![objective_prev];
    let mut best_x = x0.to_vec();
    let mut best_f = objective_prev;

    let mut x_prev = x0.to_vec();
    let mut y = x0.to_vec();
    let mut momentum = T::one();
    let mut l = cfg.l0;
    // Far above any curvature a well-posed problem can exhibit; reaching it
    // means the line search is chasing rounding noise or a non-smooth f.
    let l_cap = T::of(1.0e40);

    let mut iterations = 0;
    let mut converged = false;

    for _ in 1..=cfg.max_iters {
        let f_y = checked(f_val(&y)?, "fista objective")?;
        let grad = f_grad(&y)?;
        if grad.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "fista gradient has length {}, expected {}",
                grad.len(),
                y.len()
            )));
        }
        if !cvec::all_finite(&grad) {
            return Err(Error::NonFinite("fista gradient".into()));
        }

        // Backtracking: grow L until f(x) fits under its quadratic model
        // at y. A slack of a few ulps keeps rounding from forcing extra
        // doublings once both sides agree to machine precision.
        let x = loop {
            let step = T::one() / l;
            let trial_point: Vec<Complex<T>> = y
                .iter()
                .zip(&grad)
                .map(|(yl, gl)| yl - gl * step)
                .collect();
            let candidate = prox(&trial_point, step);
            let f_c = checked(f_val(&candidate)?, "fista objective")?;
            let diff = cvec::sub(&candidate, &y);
            let model = f_y + cvec::dot_re(&grad, &diff) + l * cvec::norm_sqr(&diff) / T::of(2.0);
            let slack = T::epsilon() * (T::one() + f_y.abs() + model.abs());
            if f_c <= model + slack {
                break candidate;
            }
            l = l * cfg.eta;
            if l > l_cap {
                return Err(Error::Breakdown(
                    "fista backtracking found no acceptable step".into(),
                ));
            }
        };

        let momentum_next = (T::one() + (T::one() + T::of(4.0) * momentum * momentum).sqrt())
            / T::of(2.0);
        let mix = (momentum - T::one()) / momentum_next;
        y = x
            .iter()
            .zip(&x_prev)
            .map(|(xl, pl)| xl + (xl - pl) * mix)
            .collect();
        momentum = momentum_next;
        x_prev = x.clone();
        iterations += 1;

        let objective = checked(f_val(&x)?, "fista objective")? + g_val(&x);
        if !objective.is_finite() {
            return Err(Error::NonFinite("fista objective".into()));
        }
        objectives.push(objective);
        if objective < best_f {
            best_f = objective;
            best_x = x;
        }
        if (objective - objective_prev).abs() <= cfg.rel_tol * T::one().max(objective.abs()) {
            converged = true;
            break;
        }
        objective_prev = objective;
    }

    Ok((
        best_x,
        FistaReport {
            iterations,
            converged,
            objectives,
        },
    ))
}

fn checked<T: Real>(v: T, what: &str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::prox::shrink;
    use num_complex::Complex64;
    use rand::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Smooth quadratic pieces for f(x) = 0.5 * w * ||x - v||^2.
    fn quadratic(
        v: Vec<Complex64>,
        w: f64,
    ) -> (
        impl Fn(&[Complex64]) -> crate::Result<Vec<Complex64>>,
        impl Fn(&[Complex64]) -> crate::Result<f64>,
    ) {
        let v2 = v.clone();
        (
            move |x: &[Complex64]| Ok(x.iter().zip(&v).map(|(xl, vl)| (xl - vl) * w).collect()),
            move |x: &[Complex64]| Ok(0.5 * w * cvec::norm_sqr(&cvec::sub(x, &v2))),
        )
    }

    #[test]
    fn minimizes_a_smooth_quadratic() {
        let target = vec![c(3.0, -1.0), c(-0.5, 2.0)];
        let (grad, val) = quadratic(target.clone(), 1.0);
        let x0 = vec![c(0.0, 0.0); 2];
        let (x, report) = fista(grad, val, |_| 0.0, |v, _| v.to_vec(), &x0, &FistaConfig::default()).unwrap();
        assert!(report.converged);
        for (got, want) in x.iter().zip(&target) {
            assert!((got - want).norm() <= 1.0e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn lasso_with_identity_design_matches_the_closed_form() {
        // min 0.5 ||x - v||^2 + tau ||x||_1 has solution soft_threshold(v, tau).
        let mut rng = StdRng::seed_from_u64(61);
        let v: Vec<Complex64> = (0..20)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let tau = 0.8;
        let (grad, val) = quadratic(v.clone(), 1.0);
        let cfg = FistaConfig {
            max_iters: 2000,
            rel_tol: 1.0e-14,
            ..FistaConfig::default()
        };
        let (x, report) = fista(
            grad,
            val,
            |z: &[Complex64]| tau * cvec::norm1(z),
            |z, step| shrink(z, tau * step),
            &vec![c(0.0, 0.0); 20],
            &cfg,
        )
        .unwrap();
        assert!(report.converged);
        let want = shrink(&v, tau);
        for (l, (got, expect)) in x.iter().zip(&want).enumerate() {
            assert!(
                (got - expect).norm() <= 1.0e-7,
                "entry {l}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn backtracking_recovers_from_a_low_curvature_guess() {
        // Curvature 500 with l0 = 1 forces the line search to ramp up.
        let target = vec![c(1.0, 1.0)];
        let (grad, val) = quadratic(target.clone(), 500.0);
        let (x, report) = fista(
            grad,
            val,
            |_| 0.0,
            |v, _| v.to_vec(),
            &[c(0.0, 0.0)],
            &FistaConfig::default(),
        )
        .unwrap();
        assert!(report.converged);
        assert!((x[0] - target[0]).norm() <= 1.0e-6);
    }

    #[test]
    fn never_returns_a_worse_objective_than_the_start() {
        let mut rng = StdRng::seed_from_u64(67);
        for trial in 0..5 {
            let n = 15;
            let v: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let tau = rng.gen_range(0.1..1.0);
            let x0: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let (grad, val) = quadratic(v.clone(), 3.0);
            let cfg = FistaConfig {
                max_iters: rng.gen_range(1..40),
                ..FistaConfig::default()
            };
            let (x, _) = fista(
                grad,
                val,
                |z: &[Complex64]| tau * cvec::norm1(z),
                |z, step| shrink(z, tau * step),
                &x0,
                &cfg,
            )
            .unwrap();
            let objective = |z: &[Complex64]| {
                1.5 * cvec::norm_sqr(&cvec::sub(z, &v)) + tau * cvec::norm1(z)
            };
            assert!(
                objective(&x) <= objective(&x0) + 1.0e-12,
                "trial {trial}: start objective beaten"
            );
        }
    }

    #[test]
    fn zero_tolerance_runs_to_the_iteration_cap() {
        // Curvature 0.7 with l0 = 1 leaves the minimum unreachable in
        // finite steps, so objectives change every iteration and only the
        // cap can stop the run.
        let (grad, val) = quadratic(vec![c(2.0, 0.0)], 0.7);
        let cfg = FistaConfig {
            max_iters: 10,
            rel_tol: 0.0,
            ..FistaConfig::default()
        };
        let (_, report) = fista(grad, val, |_| 0.0, |v, _| v.to_vec(), &[c(0.0, 0.0)], &cfg).unwrap();
        assert_eq!(report.iterations, 10);
        assert!(!report.converged);
        assert_eq!(report.objectives.len(), 11, "initial value plus one per iteration");
    }

    #[test]
    fn non_finite_objectives_are_errors() {
        let grad = |x: &[Complex64]| Ok(x.to_vec());
        let val = |_: &[Complex64]| Ok(f64::NAN);
        let err = fista(grad, val, |_| 0.0, |v, _| v.to_vec(), &[c(1.0, 0.0)], &FistaConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)), "got {err}");
    }

    #[test]
    fn validates_config() {
        let grad = |x: &[Complex64]| Ok(x.to_vec());
        let val = |x: &[Complex64]| Ok(0.5 * cvec::norm_sqr(x));
        for cfg in [
            FistaConfig { l0: 0.0, ..FistaConfig::default() },
            FistaConfig { eta: 1.0, ..FistaConfig::default() },
            FistaConfig { max_iters: 0, ..FistaConfig::default() },
            FistaConfig { rel_tol: -1.0, ..FistaConfig::default() },
        ] {
            assert!(
                fista(grad, val, |_| 0.0, |v: &[Complex64], _| v.to_vec(), &[c(1.0, 0.0)], &cfg).is_err(),
                "{cfg:?} should be rejected"
            );
        }
    }
}
