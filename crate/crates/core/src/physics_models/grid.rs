use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::linalg::check_len;
use crate::{Error, Result, StateVector};

/// Uniform periodic grid on `[x_min, x_max)` with FFT plans.
#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    x_min: f64,
    x_max: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid")
            .field("n", &self.n)
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .finish()
    }
}

impl FourierGrid {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "empty domain [{x_min}, {x_max})"
            )));
        }
        let length = x_max - x_min;
        let dx = length / n as f64;
        let points = (0..n).map(|j| x_min + j as f64 * dx).collect();
        let base = 2.0 * PI / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let idx = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                base * idx
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            x_min,
            x_max,
            points,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// `[-r_max, r_max)`
    pub fn symmetric(n: usize, r_max: f64) -> Result<Self> {
        Self::new(n, -r_max, r_max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Standard FFT ordering; index `n/2` carries the (negative) Nyquist value.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// `sqrt(sum |u|^2 dx)`
    pub fn weighted_norm(&self, u: &[Complex64]) -> f64 {
        (u.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx()).sqrt()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> StateVector {
        self.points.iter().map(|&x| f(x)).collect()
    }

    /// Applies the Fourier multiplier `symbol(k, j)` in place.
    pub(crate) fn apply_multiplier(
        &self,
        buf: &mut [Complex64],
        symbol: impl Fn(f64, usize) -> Complex64,
    ) {
        self.forward.process(buf);
        let inv_n = 1.0 / self.n as f64;
        for (j, (b, &k)) in buf.iter_mut().zip(&self.wavenumbers).enumerate() {
            *b *= symbol(k, j) * inv_n;
        }
        self.inverse.process(buf);
    }
}

/// Spectral derivative of order 1 or 2. The Nyquist mode is dropped for the
/// first derivative and kept as `-k^2` for the second.
pub fn fourier_derivative(grid: &FourierGrid, u: &[Complex64], order: u32) -> Result<StateVector> {
    check_len(u, grid.n())?;
    let nyquist = grid.n() / 2;
    let mut buf = u.to_vec();
    match order {
        1 => grid.apply_multiplier(&mut buf, |k, j| {
            if j == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        }),
        2 => grid.apply_multiplier(&mut buf, |k, _| Complex64::new(-k * k, 0.0)),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {order}"
            )))
        }
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn resolved_modes_are_exact() {
        let grid = FourierGrid::new(32, 0.0, 2.0 * PI).unwrap();
        let u = grid.sample(|x| Complex64::new((3.0 * x).sin(), 0.0));
        let du = fourier_derivative(&grid, &u, 1).unwrap();
        let want = grid.sample(|x| Complex64::new(3.0 * (3.0 * x).cos(), 0.0));
        assert!(max_err(&du, &want) < 1e-12);

        let e = grid.sample(|x| Complex64::new(0.0, 5.0 * x).exp());
        let d2 = fourier_derivative(&grid, &e, 2).unwrap();
        let want: Vec<_> = e.iter().map(|v| v * -25.0).collect();
        assert!(max_err(&d2, &want) < 1e-12);
    }

    #[test]
    fn constants_have_zero_derivative() {
        let grid = FourierGrid::new(16, -3.0, 5.0).unwrap();
        let u = vec![Complex64::new(2.0, -1.0); 16];
        for order in [1, 2] {
            let d = fourier_derivative(&grid, &u, order).unwrap();
            assert!(d.iter().all(|v| v.norm() < 1e-13));
        }
        assert!(fourier_derivative(&grid, &u, 3).is_err());
    }

    #[test]
    fn nyquist_convention() {
        let grid = FourierGrid::new(8, 0.0, 2.0 * PI).unwrap();
        // cos(4x) is the Nyquist mode on 8 points
        let u = grid.sample(|x| Complex64::new((4.0 * x).cos(), 0.0));
        let d1 = fourier_derivative(&grid, &u, 1).unwrap();
        assert!(d1.iter().all(|v| v.norm() < 1e-13));
        let d2 = fourier_derivative(&grid, &u, 2).unwrap();
        let want: Vec<_> = u.iter().map(|v| v * -16.0).collect();
        assert!(max_err(&d2, &want) < 1e-12);
    }

    #[test]
    fn grid_geometry() {
        assert!(FourierGrid::new(12, 0.0, 1.0).is_err());
        assert!(FourierGrid::new(16, 1.0, 1.0).is_err());
        let g = FourierGrid::symmetric(128, 10.0).unwrap();
        assert_eq!(g.points()[0], -10.0);
        assert!((g.dx() - 20.0 / 128.0).abs() < 1e-15);
        assert!((g.k_max() - PI * 128.0 / 20.0).abs() < 1e-12);
        assert!((g.wavenumbers()[64] + g.k_max()).abs() < 1e-12);
    }
}
