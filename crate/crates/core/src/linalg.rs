//! Small vector kernels shared by the propagators.

use num_complex::Complex64;

use crate::{Error, Result, StateVector};

pub fn zeros(n: usize) -> StateVector {
    vec![Complex64::new(0.0, 0.0); n]
}

/// `y += a * x`
pub fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `y += a * x` for a real scalar.
pub fn axpy_real(a: f64, x: &[Complex64], y: &mut [Complex64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

pub fn scale(a: Complex64, x: &mut [Complex64]) {
    for xi in x {
        *xi *= a;
    }
}

pub fn sub(x: &[Complex64], y: &[Complex64]) -> StateVector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[Complex64], y: &[Complex64]) -> StateVector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// Unweighted discrete L2 norm.
pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `||x - reference|| / ||reference||`
pub fn rel_l2_error(x: &[Complex64], reference: &[Complex64]) -> f64 {
    dist(x, reference) / norm(reference)
}

/// `<x, y>` with the conjugate on the left argument.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn all_finite(x: &[Complex64]) -> bool {
    x.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

pub fn check_len(x: &[Complex64], expected: usize) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found: x.len(),
        })
    }
}
