//! Browser demo: each export wraps a plain function that native tests call
//! directly.

use semiglobal::linalg::rel_l2_error;
use semiglobal::physics_models::{Advection, DrivenOscillator};
use semiglobal::reference::rk4_problem;
use semiglobal::scalar_kernels::{fm_cheb_coeffs, FmOrder, SpectralSegment, DEFAULT_OVERSAMPLING};
use semiglobal::semiglobal::{propagate_with, PropagatorConfig};
use wasm_bindgen::prelude::*;

fn err_text(e: semiglobal::Error) -> String {
    e.to_string()
}

/// Grid of the driven oscillator.
pub fn oscillator_grid_points() -> Vec<f64> {
    DrivenOscillator::standard().map(|p| p.grid().points().to_vec()).unwrap_or_default()
}

/// `|psi|^2` of the driven oscillator at `frames` evenly spaced times in
/// `[0, T]`, frame after frame.
pub fn oscillator_density_frames(m: usize, steps: usize, frames: usize) -> Result<Vec<f64>, String> {
    if frames < 2 || frames > steps + 1 {
        return Err(format!("frames must be in 2..={}", steps + 1));
    }
    let p = DrivenOscillator::standard().map_err(err_text)?;
    let cfg = PropagatorConfig::new(m, m, steps).with_tail_tol(None);
    let want: Vec<usize> = (0..frames).map(|f| f * steps / (frames - 1)).collect();
    let mut out = Vec::with_capacity(frames * p.grid().n());
    propagate_with(&p, &p.initial_state(), DrivenOscillator::T, &cfg, |n, _, u| {
        if want.binary_search(&n).is_ok() {
            out.extend(u.iter().map(|c| c.norm_sqr()));
        }
    })
    .map_err(err_text)?;
    Ok(out)
}

/// `|c_n|` of the Chebyshev expansion of `f_m(z, t)` for `z` in
/// `i [-half_width, half_width]`.
pub fn fm_coefficient_magnitudes(m: u32, k: usize, t: f64, half_width: f64) -> Result<Vec<f64>, String> {
    let seg = SpectralSegment::new(-half_width, half_width).map_err(err_text)?;
    let order = FmOrder::new(m).map_err(err_text)?;
    let set = fm_cheb_coeffs(seg, t, order, k, DEFAULT_OVERSAMPLING, None).map_err(err_text)?;
    Ok(set.coefficients.iter().map(|c| c.norm()).collect())
}

/// Advection errors at final time 5: for each step count, the semi-global
/// `(matvecs, error)` with `m = k` followed by RK4 at the same matvec budget.
pub fn advection_error_curve(m: usize, steps: &[u32]) -> Result<Vec<f64>, String> {
    let p = Advection::new(32).map_err(err_text)?;
    let u0 = p.initial_state();
    let exact = p.exact(5.0);
    let mut out = Vec::with_capacity(4 * steps.len());
    for &s in steps {
        let cfg = PropagatorConfig::new(m, m, s as usize).with_tail_tol(None);
        let (u, stats) = propagate_with(&p, &u0, 5.0, &cfg, |_, _, _| {}).map_err(err_text)?;
        let rk_steps = stats.matvecs.div_ceil(4) as usize;
        let rk = rk4_problem(&p, &u0, 5.0, rk_steps).map_err(err_text)?;
        out.extend([
            stats.matvecs as f64,
            rel_l2_error(&u, &exact),
            rk.matvecs as f64,
            rel_l2_error(&rk.state, &exact),
        ]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = oscillatorGrid)]
pub fn oscillator_grid() -> Vec<f64> {
    oscillator_grid_points()
}

#[wasm_bindgen(js_name = oscillatorDensity)]
pub fn oscillator_density(m: usize, steps: usize, frames: usize) -> Result<Vec<f64>, JsError> {
    oscillator_density_frames(m, steps, frames).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fmCoefficients)]
pub fn fm_coefficients(m: u32, k: usize, t: f64, half_width: f64) -> Result<Vec<f64>, JsError> {
    fm_coefficient_magnitudes(m, k, t, half_width).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = advectionErrors)]
pub fn advection_errors(m: usize, steps: Vec<u32>) -> Result<Vec<f64>, JsError> {
    advection_error_curve(m, &steps).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_frames_keep_mass() {
        let n = oscillator_grid_points().len();
        assert_eq!(n, 128);
        let frames = oscillator_density_frames(9, 400, 5).unwrap();
        assert_eq!(frames.len(), 5 * n);
        let mass: Vec<f64> = frames.chunks(n).map(|f| f.iter().sum()).collect();
        for w in &mass {
            assert!((w / mass[0] - 1.0).abs() < 1e-9, "{mass:?}");
        }
        assert!(oscillator_density_frames(7, 10, 1).is_err());
        assert!(oscillator_density_frames(1, 10, 3).is_err());
    }

    #[test]
    fn coefficients_decay_past_the_bandwidth() {
        let c = fm_coefficient_magnitudes(4, 60, 1.0, 20.0).unwrap();
        assert_eq!(c.len(), 60);
        let head = c[..10].iter().cloned().fold(0.0, f64::max);
        assert!(c[59] < 1e-10 * head, "{} vs {head}", c[59]);
        assert!(fm_coefficient_magnitudes(0, 10, 1.0, 20.0).is_err());
    }

    #[test]
    fn error_curve_improves_with_steps() {
        let rows = advection_error_curve(9, &[20, 40]).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows[5] < rows[1], "{rows:?}");
        assert!(rows[2] >= rows[0]);
        assert!(advection_error_curve(9, &[]).unwrap().is_empty());
    }
}
