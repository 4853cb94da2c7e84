//! Small helpers for slices of complex numbers.
//!
//! Inner products use the physics convention: `dot(a, b) = sum conj(a_l) * b_l`,
//! i.e. conjugate-linear in the first argument. All reductions run in index
//! order so results are reproducible bit for bit.

use num_complex::Complex;

use crate::scalar::Real;

/// Hermitian inner product `sum_l conj(a_l) * b_l`.
///
/// Panics in debug builds if the lengths differ; callers validate lengths
/// at their own boundaries.
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// Real part of the Hermitian inner product.
pub fn dot_re<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    dot(a, b).re
}

/// Squared Euclidean norm `sum_l |a_l|^2`.
pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for x in a {
        acc += x.norm_sqr();
    }
    acc
}

/// Euclidean norm.
pub fn norm2<T: Real>(a: &[Complex<T>]) -> T {
    norm_sqr(a).sqrt()
}

/// l1 norm `sum_l |a_l|` (sum of complex moduli).
pub fn norm1<T: Real>(a: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for x in a {
        acc += x.norm();
    }
    acc
}

/// `y += alpha * x` in place.
pub fn axpy<T: Real>(alpha: Complex<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
    debug_assert_eq!(x.len(), y.len());
    for (yl, xl) in y.iter_mut().zip(x) {
        *yl += alpha * xl;
    }
}

/// Elementwise difference `a - b` as a new vector.
pub fn sub<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// True if every component of every entry is finite.
pub fn all_finite<T: Real>(a: &[Complex<T>]) -> bool {
    a.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dot_conjugates_first_argument() {
        let a = [c(0.0, 1.0)]; // j
        let b = [c(0.0, 1.0)];
        // conj(j) * j = -j * j = 1
        assert_eq!(dot(&a, &b), c(1.0, 0.0));
    }

    #[test]
    fn dot_is_conjugate_symmetric() {
        let a = [c(1.0, 2.0), c(-0.5, 0.25)];
        let b = [c(0.3, -0.7), c(2.0, 1.0)];
        assert_eq!(dot(&a, &b), dot(&b, &a).conj());
    }

    #[test]
    fn norms_on_a_known_vector() {
        let a = [c(3.0, 4.0), c(0.0, 0.0)];
        assert_eq!(norm_sqr(&a), 25.0);
        assert_eq!(norm2(&a), 5.0);
        assert_eq!(norm1(&a), 5.0);
    }

    #[test]
    fn axpy_accumulates() {
        let x = [c(1.0, 0.0), c(0.0, 1.0)];
        let mut y = [c(0.0, 0.0), c(1.0, 0.0)];
        axpy(c(2.0, 0.0), &x, &mut y);
        assert_eq!(y, [c(2.0, 0.0), c(1.0, 2.0)]);
    }

    #[test]
    fn all_finite_flags_nan_and_inf() {
        assert!(all_finite::<f64>(&[c(1.0, -2.0)]));
        assert!(!all_finite::<f64>(&[c(f64::NAN, 0.0)]));
        assert!(!all_finite::<f64>(&[c(0.0, f64::INFINITY)]));
    }
}
