//! Proximal operator of the (complex) l1 norm.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex soft-thresholding: the proximal operator of `tau * ||.||_1`.
///
/// Each entry shrinks radially toward zero:
///
/// ```text
/// out_l = v_l * max(|v_l| - tau, 0) / |v_l|    (0 when v_l = 0)
/// ```
///
/// Entries with `|v_l| <= tau` land exactly on zero, which is what makes
/// l1-regularized iterations produce genuinely sparse images. `tau = 0` is
/// the identity.
pub fn soft_threshold<T: Real>(v: &[Complex<T>], tau: T) -> Result<Vec<Complex<T>>> {
    if !tau.is_finite() || tau < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "soft threshold must be nonnegative and finite, got {tau}"
        )));
    }
    Ok(shrink(v, tau))
}

/// Unvalidated soft-thresholding for internal hot paths.
pub(crate) fn shrink<T: Real>(v: &[Complex<T>], tau: T) -> Vec<Complex<T>> {
    debug_assert!(tau >= T::zero());
    v.iter()
        .map(|&z| {
            let n = z.norm();
            if n <= tau {
                Complex::new(T::zero(), T::zero())
            } else {
                // (n - tau) / n is exactly 1 when tau = 0, so the zero
                // threshold is a bitwise identity on nonzero entries.
                z * ((n - tau) / n)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec;
    use num_complex::Complex64;
    use rand::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn worked_example() {
        // |3 + 4j| = 5; shrinking by 2 scales by 3/5.
        let out = soft_threshold(&[c(3.0, 4.0)], 2.0).unwrap();
        assert!((out[0] - c(1.8, 2.4)).norm() <= 1.0e-15, "got {}", out[0]);
    }

    #[test]
    fn small_entries_land_exactly_on_zero() {
        let out = soft_threshold(&[c(0.3, -0.4), c(0.0, 0.0), c(-2.0, 0.0)], 0.5).unwrap();
        assert_eq!(out[0], c(0.0, 0.0));
        assert_eq!(out[1], c(0.0, 0.0));
        assert_eq!(out[2], c(-1.5, 0.0));
    }

    #[test]
    fn zero_threshold_is_the_identity() {
        let mut rng = StdRng::seed_from_u64(3);
        let v: Vec<Complex64> = (0..64)
            .map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
            .collect();
        assert_eq!(soft_threshold(&v, 0.0).unwrap(), v);
    }

    #[test]
    fn phase_is_preserved_and_modulus_shrinks_by_tau() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let z = Complex64::from_polar(rng.gen_range(0.1..4.0), rng.gen_range(-3.1..3.1));
            let tau = rng.gen_range(0.0..2.0);
            let out = soft_threshold(&[z], tau).unwrap()[0];
            let want = (z.norm() - tau).max(0.0);
            assert!((out.norm() - want).abs() <= 1.0e-12);
            if out.norm() > 0.0 {
                assert!((out.arg() - z.arg()).abs() <= 1.0e-12, "phase must not move");
            }
        }
    }

    #[test]
    fn output_minimizes_the_prox_objective() {
        // prox minimizes 0.5 ||x - v||^2 + tau ||x||_1; random perturbations
        // of the output must not do better.
        let mut rng = StdRng::seed_from_u64(7);
        let v: Vec<Complex64> = (0..12)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let tau = 0.7;
        let x = soft_threshold(&v, tau).unwrap();
        let objective = |z: &[Complex64]| 0.5 * cvec::norm_sqr(&cvec::sub(z, &v)) + tau * cvec::norm1(z);
        let fx = objective(&x);
        for _ in 0..200 {
            let perturbed: Vec<Complex64> = x
                .iter()
                .map(|z| z + c(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
                .collect();
            assert!(objective(&perturbed) >= fx - 1.0e-12);
        }
    }

    #[test]
    fn negative_or_nan_threshold_is_rejected() {
        assert!(soft_threshold(&[c(1.0, 0.0)], -0.1).is_err());
        assert!(soft_threshold(&[c(1.0, 0.0)], f64::NAN).is_err());
    }
}
