//! Classical Runge–Kutta reference integrators for `u' = f(t, u)`.

use num_complex::Complex64;

use crate::linalg::{all_finite, check_len};
use crate::operators::MatvecCounter;
use crate::semiglobal::EvolutionProblem;
use crate::{Error, Result, StateVector};

/// `u + h sum_i b_i k_i`
fn combine(u: &[Complex64], h: f64, terms: &[(f64, &StateVector)]) -> StateVector {
    let mut out = u.to_vec();
    for &(b, k) in terms {
        if b == 0.0 {
            continue;
        }
        let w = h * b;
        for (o, x) in out.iter_mut().zip(k.iter()) {
            *o += x * w;
        }
    }
    out
}

fn finite(u: StateVector, what: &'static str) -> Result<StateVector> {
    if all_finite(&u) {
        Ok(u)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Fixed-step classical RK4; `4 * steps` right-hand-side evaluations.
pub fn rk4_propagate<F>(mut rhs: F, u0: &[Complex64], t_final: f64, steps: usize) -> Result<StateVector>
where
    F: FnMut(f64, &[Complex64]) -> Result<StateVector>,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "final time must be finite and > 0, got {t_final}"
        )));
    }
    let h = t_final / steps as f64;
    let mut u = u0.to_vec();
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = rhs(t, &u)?;
        let k2 = rhs(t + 0.5 * h, &combine(&u, h, &[(0.5, &k1)]))?;
        let k3 = rhs(t + 0.5 * h, &combine(&u, h, &[(0.5, &k2)]))?;
        let k4 = rhs(t + h, &combine(&u, h, &[(1.0, &k3)]))?;
        u = finite(
            combine(&u, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]),
            "rk4 state",
        )?;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk45Config {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the problem scale when `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Rk45Config {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h0: None,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rk45Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn error_norm(err: &[Complex64], u: &[Complex64], v: &[Complex64], cfg: &Rk45Config) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(u)
        .zip(v)
        .map(|((e, a), b)| {
            let sc = cfg.atol + cfg.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / err.len().max(1) as f64).sqrt()
}

/// Adaptive Dormand–Prince 5(4) with FSAL and PI step control.
pub fn rk45_propagate<F>(
    mut rhs: F,
    u0: &[Complex64],
    t_final: f64,
    cfg: &Rk45Config,
) -> Result<(StateVector, Rk45Stats)>
where
    F: FnMut(f64, &[Complex64]) -> Result<StateVector>,
{
    if !(cfg.rtol > 0.0 && cfg.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be > 0".into()));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "final time must be finite and > 0, got {t_final}"
        )));
    }
    let mut stats = Rk45Stats::default();
    let mut u = u0.to_vec();
    let mut t = 0.0;
    let mut k1 = rhs(t, &u)?;
    stats.rhs_evals += 1;

    let mut h = match cfg.h0 {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(Error::InvalidParameter(format!("initial step must be > 0, got {h}"))),
        None => {
            let zero = vec![Complex64::new(0.0, 0.0); u.len()];
            let d0 = error_norm(&u, &u, &zero, cfg);
            let d1 = error_norm(&k1, &u, &zero, cfg);
            let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            guess.min(t_final)
        }
    };
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t_final {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::NoConvergence {
                iterations: cfg.max_steps,
                residual: t_final - t,
            });
        }
        if t + h > t_final {
            h = t_final - t;
        }
        if h <= 1e-14 * t.abs().max(t_final) {
            return Err(Error::StepUnderflow { t, h });
        }
        let mut ks: Vec<StateVector> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for s in 1..7 {
            let terms: Vec<(f64, &StateVector)> = A[s][..s].iter().cloned().zip(ks.iter()).collect();
            let stage = combine(&u, h, &terms);
            ks.push(rhs(t + C[s] * h, &stage)?);
            stats.rhs_evals += 1;
        }
        // The 6th stage point is the 5th-order solution.
        let terms: Vec<(f64, &StateVector)> = A[6].iter().cloned().zip(ks.iter()).collect();
        let u_new = combine(&u, h, &terms);
        let e_terms: Vec<(f64, &StateVector)> = E.iter().cloned().zip(ks.iter()).collect();
        let zero = vec![Complex64::new(0.0, 0.0); u.len()];
        let err_vec = combine(&zero, h, &e_terms);
        let err = error_norm(&err_vec, &u, &u_new, cfg);
        if !err.is_finite() {
            return Err(Error::NonFinite("rk45 error estimate"));
        }

        if err <= 1.0 {
            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                SAFETY * err.powf(-ALPHA) * err_old.powf(BETA)
            };
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            t = if t_final - (t + h) <= 1e-14 * t_final { t_final } else { t + h };
            u = finite(u_new, "rk45 state")?;
            k1 = ks.pop().expect("seven stages");
            err_old = err.max(1e-4);
            stats.accepted += 1;
            last_rejected = false;
            h *= fac;
        } else {
            let fac = (SAFETY * err.powf(-ALPHA)).max(FAC_MIN);
            h *= fac;
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok((u, stats))
}

/// Right-hand side of an [`EvolutionProblem`] counting one matvec per call.
pub fn problem_rhs<'p, P: EvolutionProblem + ?Sized>(
    problem: &'p P,
    counter: &'p MatvecCounter,
) -> impl FnMut(f64, &[Complex64]) -> Result<StateVector> + 'p {
    move |t, u| problem.rhs(t, u, counter)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRun {
    pub state: StateVector,
    pub matvecs: u64,
    /// Attempted steps; equals `steps` for RK4.
    pub steps: usize,
    pub rk45: Option<Rk45Stats>,
}

pub fn rk4_problem<P: EvolutionProblem + ?Sized>(
    problem: &P,
    u0: &[Complex64],
    t_final: f64,
    steps: usize,
) -> Result<ReferenceRun> {
    check_len(u0, problem.dim())?;
    let counter = MatvecCounter::new();
    let state = rk4_propagate(problem_rhs(problem, &counter), u0, t_final, steps)?;
    Ok(ReferenceRun {
        state,
        matvecs: counter.get(),
        steps,
        rk45: None,
    })
}

pub fn rk45_problem<P: EvolutionProblem + ?Sized>(
    problem: &P,
    u0: &[Complex64],
    t_final: f64,
    cfg: &Rk45Config,
) -> Result<ReferenceRun> {
    check_len(u0, problem.dim())?;
    let counter = MatvecCounter::new();
    let (state, stats) = rk45_propagate(problem_rhs(problem, &counter), u0, t_final, cfg)?;
    Ok(ReferenceRun {
        state,
        matvecs: counter.get(),
        steps: stats.accepted + stats.rejected,
        rk45: Some(stats),
    })
}
