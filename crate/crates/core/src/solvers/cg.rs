//! Conjugate gradients for Hermitian positive-definite systems.

use num_complex::Complex;

use crate::cvec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Conjugate-gradient stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig<T> {
    /// Hard iteration cap.
    pub max_iters: usize,
    /// Stop when `||G x - b|| <= rel_tol * ||b||`.
    pub rel_tol: T,
}

impl<T: Real> Default for CgConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: T::of(1.0e-8),
        }
    }
}

impl<T: Real> CgConfig<T> {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("cg needs max_iters >= 1".into()));
        }
        if !self.rel_tol.is_finite() || self.rel_tol < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "cg rel_tol must be nonnegative and finite, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Result of a conjugate-gradient solve.
///
/// Hitting the iteration cap is reported through `converged`, not as an
/// error: callers like the ADMM outer loop can keep going with the best
/// iterate. Errors are reserved for systems CG cannot handle at all.
#[derive(Debug, Clone)]
pub struct CgOutcome<T> {
    /// Best iterate found.
    pub x: Vec<Complex<T>>,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Final (recursive) residual norm `||b - G x||`.
    pub residual_norm: T,
    /// Whether the relative tolerance was met.
    pub converged: bool,
}

/// Solves `G x = b` for Hermitian positive-definite `G` given as a
/// matrix-vector product, optionally warm-started at `x0`.
///
/// Non-positive curvature `<p, G p> <= 0` means `G` is not positive
/// definite on the search space and is reported as [`Error::Breakdown`].
pub fn cg_solve<T, F>(
    apply: F,
    b: &[Complex<T>],
    x0: Option<&[Complex<T>]>,
    cfg: &CgConfig<T>,
) -> Result<CgOutcome<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
{
    cfg.validate()?;
    if !cvec::all_finite(b) {
        return Err(Error::NonFinite("cg right-hand side".into()));
    }
    let n = b.len();
    let b_norm = cvec::norm2(b);
    if b_norm == T::zero() {
        // The unique solution of G x = 0 for positive-definite G.
        return Ok(CgOutcome {
            x: vec![Complex::new(T::zero(), T::zero()); n],
            iterations: 0,
            residual_norm: T::zero(),
            converged: true,
        });
    }
    let threshold = cfg.rel_tol * b_norm;

    let (mut x, mut r) = match x0 {
        Some(start) => {
            if start.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "cg warm start has length {}, expected {}",
                    start.len(),
                    n
                )));
            }
            if !cvec::all_finite(start) {
                return Err(Error::NonFinite("cg warm start".into()));
            }
            let gx = apply_checked(&apply, start, n)?;
            (start.to_vec(), cvec::sub(b, &gx))
        }
        None => (vec![Complex::new(T::zero(), T::zero()); n], b.to_vec()),
    };

    let mut rs = cvec::norm_sqr(&r);
    if rs.sqrt() <= threshold {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual_norm: rs.sqrt(),
            converged: true,
        });
    }
    let mut p = r.clone();

    for iter in 1..=cfg.max_iters {
        let gp = apply_checked(&apply, &p, n)?;
        let curvature = cvec::dot_re(&p, &gp);
        if !curvature.is_finite() {
            return Err(Error::NonFinite("cg curvature".into()));
        }
        if curvature <= T::zero() {
            return Err(Error::Breakdown(format!(
                "cg met non-positive curvature {curvature} at iteration {iter}; \
                 the system is not positive definite"
            )));
        }
        let alpha = rs / curvature;
        cvec::axpy(Complex::new(alpha, T::zero()), &p, &mut x);
        cvec::axpy(Complex::new(-alpha, T::zero()), &gp, &mut r);
        let rs_next = cvec::norm_sqr(&r);
        if rs_next.sqrt() <= threshold {
            return Ok(CgOutcome {
                x,
                iterations: iter,
                residual_norm: rs_next.sqrt(),
                converged: true,
            });
        }
        let ratio = rs_next / rs;
        for (pl, rl) in p.iter_mut().zip(&r) {
            *pl = rl + *pl * ratio;
        }
        rs = rs_next;
    }

    Ok(CgOutcome {
        x,
        iterations: cfg.max_iters,
        residual_norm: rs.sqrt(),
        converged: false,
    })
}

fn apply_checked<T, F>(apply: &F, v: &[Complex<T>], n: usize) -> Result<Vec<Complex<T>>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
{
    let out = apply(v)?;
    if out.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cg operator returned length {}, expected {}",
            out.len(),
            n
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Dense Hermitian matvec over a row-major n x n matrix.
    fn matvec(m: &[Complex64], n: usize) -> impl Fn(&[Complex64]) -> crate::Result<Vec<Complex64>> + '_ {
        move |v| {
            Ok((0..n)
                .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
                .collect())
        }
    }

    /// Random Hermitian positive-definite matrix `M^H M + I`.
    fn random_hpd(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
        let m: Vec<Complex64> = (0..n * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut g = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += m[k * n + i].conj() * m[k * n + j];
                }
                g[i * n + j] = acc + if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            }
        }
        g
    }

    #[test]
    fn solves_a_two_by_two_system_with_known_solution() {
        // G = [[2, j], [-j, 2]] is Hermitian with eigenvalues 1 and 3;
        // G x = (1, 0) has the unique solution x = (2/3, j/3).
        let g = vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)];
        let b = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let out = cg_solve(matvec(&g, 2), &b, None, &CgConfig::default()).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - c(2.0 / 3.0, 0.0)).norm() <= 1.0e-10);
        assert!((out.x[1] - c(0.0, 1.0 / 3.0)).norm() <= 1.0e-10);
    }

    #[test]
    fn recovers_random_solutions_to_tight_tolerance() {
        let mut rng = StdRng::seed_from_u64(41);
        for trial in 0..6 {
            let n = 12;
            let g = random_hpd(&mut rng, n);
            let x_star: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let b = matvec(&g, n)(&x_star).unwrap();
            let cfg = CgConfig {
                max_iters: 200,
                rel_tol: 1.0e-12,
            };
            let out = cg_solve(matvec(&g, n), &b, None, &cfg).unwrap();
            assert!(out.converged, "trial {trial}");
            let err = cvec::norm2(&cvec::sub(&out.x, &x_star));
            assert!(
                err <= 1.0e-8 * cvec::norm2(&x_star),
                "trial {trial}: error {err}"
            );
        }
    }

    #[test]
    fn zero_rhs_returns_zero_immediately() {
        let g = vec![c(3.0, 0.0)];
        let b = vec![c(0.0, 0.0)];
        let warm = vec![c(5.0, -2.0)];
        let out = cg_solve(matvec(&g, 1), &b, Some(&warm), &CgConfig::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn warm_start_at_the_solution_takes_no_iterations() {
        let mut rng = StdRng::seed_from_u64(43);
        let n = 8;
        let g = random_hpd(&mut rng, n);
        let b: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let cfg = CgConfig {
            max_iters: 100,
            rel_tol: 1.0e-10,
        };
        let first = cg_solve(matvec(&g, n), &b, None, &cfg).unwrap();
        assert!(first.converged);
        let second = cg_solve(matvec(&g, n), &b, Some(&first.x), &cfg).unwrap();
        assert_eq!(second.iterations, 0, "already at the solution");
        assert_eq!(second.x, first.x);
    }

    #[test]
    fn converges_in_at_most_dimension_iterations_plus_slack() {
        // Exact-arithmetic CG finishes in n steps; allow a little rounding.
        let mut rng = StdRng::seed_from_u64(47);
        let n = 6;
        let g = random_hpd(&mut rng, n);
        let b: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), 0.3)).collect();
        let cfg = CgConfig {
            max_iters: 50,
            rel_tol: 1.0e-10,
        };
        let out = cg_solve(matvec(&g, n), &b, None, &cfg).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= n + 4, "took {} iterations", out.iterations);
    }

    #[test]
    fn indefinite_systems_break_down() {
        let g = vec![c(-1.0, 0.0)];
        let b = vec![c(1.0, 0.0)];
        let err = cg_solve(matvec(&g, 1), &b, None, &CgConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Breakdown(_)), "got {err}");
    }

    #[test]
    fn iteration_cap_is_reported_not_thrown() {
        let mut rng = StdRng::seed_from_u64(53);
        let n = 16;
        let g = random_hpd(&mut rng, n);
        let b: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let cfg = CgConfig {
            max_iters: 1,
            rel_tol: 1.0e-14,
        };
        let out = cg_solve(matvec(&g, n), &b, None, &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
        assert!(out.residual_norm > 0.0);
    }

    #[test]
    fn validates_inputs() {
        let g = vec![c(1.0, 0.0)];
        let b = vec![c(1.0, 0.0)];
        let bad_warm = vec![c(0.0, 0.0); 2];
        assert!(cg_solve(matvec(&g, 1), &b, Some(&bad_warm), &CgConfig::default()).is_err());
        assert!(cg_solve(matvec(&g, 1), &[c(f64::NAN, 0.0)], None, &CgConfig::default()).is_err());
        let bad_cfg = CgConfig {
            max_iters: 0,
            rel_tol: 1.0e-8,
        };
        assert!(cg_solve(matvec(&g, 1), &b, None, &bad_cfg).is_err());
        // Operator returning the wrong length is caught.
        let broken = |_: &[Complex64]| Ok(vec![c(0.0, 0.0); 3]);
        assert!(matches!(
            cg_solve(broken, &b, None, &CgConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
