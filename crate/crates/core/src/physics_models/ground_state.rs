use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{axpy_real, norm, scale, zeros};
use crate::operators::{LinearOperator, SPECTRAL_MARGIN};
use crate::{Error, Result, StateVector};

use super::grid::FourierGrid;
use super::models::Hamiltonian;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateConfig {
    /// Stop once `||H(v) v - mu v|| / ||v||` drops below this.
    pub tol: f64,
    /// Imaginary-time step.
    pub tau: f64,
    pub max_iterations: usize,
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            tau: 0.5,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    /// Real, nonnegative, `sum |v|^2 dr = 1`.
    pub state: StateVector,
    /// Chemical potential `<v, H(v) v> / <v, v>`.
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Chebyshev coefficients of `exp(-tau (lo + (hi - lo)(x + 1)/2))`, cut where
/// they fall below double precision.
fn decay_coefficients(lo: f64, hi: f64, tau: f64) -> Vec<f64> {
    let h = 0.5 * tau * (hi - lo);
    let cap = (h + 12.0 * h.sqrt() + 30.0).ceil() as usize;
    let samples = 4 * cap;
    let theta: Vec<f64> = (0..samples).map(|q| PI * (q as f64 + 0.5) / samples as f64).collect();
    let values: Vec<f64> = theta
        .iter()
        .map(|th| (-tau * (lo + 0.5 * (hi - lo) * (th.cos() + 1.0))).exp())
        .collect();
    let mut c: Vec<f64> = (0..cap)
        .map(|n| {
            values.iter().zip(&theta).map(|(v, th)| v * (n as f64 * th).cos()).sum::<f64>() * 2.0
                / samples as f64
        })
        .collect();
    c[0] *= 0.5;
    let big = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if let Some(cut) = c.iter().position(|x| x.abs() < 1e-17 * big) {
        c.truncate(cut.max(2));
    }
    c
}

fn hamiltonian_for(grid: &Arc<FourierGrid>, trap: &[f64], coupling: f64, v: &[Complex64]) -> Hamiltonian {
    let potential = trap.iter().zip(v).map(|(t, x)| t + coupling * x.norm_sqr()).collect();
    Hamiltonian::new(grid.clone(), potential).expect("grid-sized potential")
}

fn residual(h: &Hamiltonian, v: &[Complex64]) -> (f64, f64) {
    let mut hv = zeros(v.len());
    h.apply_to(v, &mut hv);
    let mu = h.expectation(v);
    axpy_real(-mu, v, &mut hv);
    (mu, norm(&hv) / norm(v))
}

/// Lowest self-consistent state of `-1/2 d^2/dr^2 + 1/2 r^2 + g |v|^2` by
/// imaginary-time propagation with renormalization after every step.
pub fn gpe_ground_state(grid: &FourierGrid, coupling: f64, cfg: &GroundStateConfig) -> Result<GroundState> {
    if !(cfg.tol > 0.0 && cfg.tau > 0.0) {
        return Err(Error::InvalidParameter("tol and tau must be > 0".into()));
    }
    let grid = Arc::new(grid.clone());
    let trap: Vec<f64> = grid.points().iter().map(|r| 0.5 * r * r).collect();
    let kinetic = 0.5 * grid.k_max() * grid.k_max();
    let normalize = |v: &mut StateVector| {
        let s = 1.0 / grid.weighted_norm(v);
        scale(Complex64::new(s, 0.0), v);
    };

    let mut v = grid.sample(|r| Complex64::new((-0.5 * r * r).exp(), 0.0));
    normalize(&mut v);
    let mut last = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        let h = hamiltonian_for(&grid, &trap, coupling, &v);
        let v_min = h.potential().iter().cloned().fold(f64::INFINITY, f64::min).min(0.0);
        let v_max = h.potential().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = SPECTRAL_MARGIN * v_min;
        let hi = SPECTRAL_MARGIN * (kinetic + v_max);
        let c = decay_coefficients(lo, hi, cfg.tau);

        // X = (2H - (hi + lo)) / (hi - lo)
        let x_apply = |w: &[Complex64]| {
            let mut out = zeros(w.len());
            h.apply_to(w, &mut out);
            for (o, wi) in out.iter_mut().zip(w) {
                *o = (*o * 2.0 - wi * (hi + lo)) / (hi - lo);
            }
            out
        };
        let mut t0 = v.clone();
        let mut t1 = x_apply(&v);
        let mut acc = zeros(v.len());
        axpy_real(c[0], &t0, &mut acc);
        axpy_real(c[1], &t1, &mut acc);
        for &cn in &c[2..] {
            let xt: StateVector = x_apply(&t1).iter().zip(&t0).map(|(a, b)| a * 2.0 - b).collect();
            t0 = std::mem::replace(&mut t1, xt);
            axpy_real(cn, &t1, &mut acc);
        }
        normalize(&mut acc);
        v = acc;

        let h = hamiltonian_for(&grid, &trap, coupling, &v);
        let (mu, res) = residual(&h, &v);
        last = res;
        if !res.is_finite() {
            return Err(Error::NonFinite("ground-state iterate"));
        }
        if res < cfg.tol {
            let state = v.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect();
            return Ok(GroundState {
                state,
                mu,
                residual: res,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual: last,
    })
}
