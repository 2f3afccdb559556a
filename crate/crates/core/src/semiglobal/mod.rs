//! Semi-global propagation of `u' = G(t, u) u + s(t, u)`.
//!
//! Each time slab freezes the generator at its midpoint, folds the remainder
//! into an effective source interpolated at Chebyshev–Lobatto nodes, and
//! solves the frozen problem with [`lemma`]. The first slab is iterated to
//! self-consistency; later slabs start from the previous slab's extrapolation
//! and take a single corrector sweep.

mod lemma;
mod problem;
mod stepper;

pub use lemma::{
    chebyshev_vectors, evaluate_solution, recurrence_vectors, solve_const_g, OneShot,
    RecurrenceVectors, SlabEvaluator,
};
pub use problem::{effective_source, ConstantGenerator, EvolutionProblem, FreezePoint};
pub use stepper::{
    first_step, propagate, propagate_with, FirstStep, Propagation, PropagationStats, SlabState,
};

use crate::cheb_algebra::MAX_TAYLOR_NODES;
use crate::scalar_kernels::{DEFAULT_OVERSAMPLING, DEFAULT_TAIL_TOL};
use crate::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_MAX_FIRST_STEP_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Lobatto nodes per slab.
    pub m: usize,
    /// Chebyshev terms for `f_m(G, tau)`.
    pub k: usize,
    pub steps: usize,
    /// First-slab convergence threshold on the end-node update.
    pub eps: f64,
    pub max_first_step_iters: usize,
    /// `None` disables the expansion tail check.
    pub tail_tol: Option<f64>,
    pub oversampling: usize,
}

impl PropagatorConfig {
    pub fn new(m: usize, k: usize, steps: usize) -> Self {
        Self {
            m,
            k,
            steps,
            eps: DEFAULT_EPS,
            max_first_step_iters: DEFAULT_MAX_FIRST_STEP_ITERS,
            tail_tol: Some(DEFAULT_TAIL_TOL),
            oversampling: DEFAULT_OVERSAMPLING,
        }
    }

    pub fn with_tail_tol(mut self, tail_tol: Option<f64>) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Matvecs per sweep for problems with a matvec-free generator difference.
    pub fn matvecs_per_sweep(&self) -> usize {
        self.m + self.k - 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_TAYLOR_NODES).contains(&self.m) {
            return Err(Error::Conditioning {
                m: self.m,
                max: MAX_TAYLOR_NODES,
            });
        }
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.steps < 1 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.max_first_step_iters < 1 {
            return Err(Error::InvalidParameter(
                "max_first_step_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
