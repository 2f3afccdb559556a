use num_complex::Complex64;

use crate::cheb_algebra::{barycentric_eval, cheb_to_taylor, samples_to_cheb, TimeSlab};
use crate::linalg::{all_finite, check_len, dist, norm};
use crate::operators::{MatvecCounter, OperatorHandle};
use crate::{Error, Result, StateVector};

use super::lemma::{chebyshev_vectors, recurrence_vectors, SlabEvaluator};
use super::problem::{effective_source, EvolutionProblem, FreezePoint};
use super::PropagatorConfig;

/// Node values of one slab.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabState {
    pub slab: TimeSlab,
    pub node_values: Vec<StateVector>,
}

/// The converged first slab.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstStep {
    pub state: SlabState,
    /// Extrapolated node values of the second slab.
    pub predicted: Vec<StateVector>,
    pub sweeps: usize,
    /// `||u_m^new - u_m^old||` after each sweep.
    pub residuals: Vec<f64>,
    pub matvecs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationStats {
    pub steps: usize,
    pub m: usize,
    pub k: usize,
    pub matvecs: u64,
    pub first_step_sweeps: usize,
    pub first_step_residuals: Vec<f64>,
    /// Largest relative gap between predicted and corrected slab end values.
    pub max_junction_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub final_state: StateVector,
    /// States at `n dt` for `n = 0..=steps`.
    pub trajectory: Vec<StateVector>,
    pub stats: PropagationStats,
}

/// Per-run data shared by every slab.
struct Stepper<'p, P: ?Sized> {
    problem: &'p P,
    counter: MatvecCounter,
    dt: f64,
    m: usize,
    /// Offsets `[off_0..off_{m-1}, dt + off_1, .., dt + off_{m-1}]`.
    evaluator: SlabEvaluator,
}

impl<'p, P: EvolutionProblem + ?Sized> Stepper<'p, P> {
    fn new(problem: &'p P, t_final: f64, cfg: &PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "final time must be finite and > 0, got {t_final}"
            )));
        }
        let dt = t_final / cfg.steps as f64;
        let probe = TimeSlab::new(0.0, dt, cfg.m)?;
        let mut taus = probe.offsets().to_vec();
        taus.extend(probe.offsets()[1..].iter().map(|o| dt + o));
        let evaluator = SlabEvaluator::new(
            problem.spectral_segment(),
            cfg.m,
            cfg.k,
            &taus,
            cfg.oversampling,
            cfg.tail_tol,
        )?;
        Ok(Self {
            problem,
            counter: MatvecCounter::new(),
            dt,
            m: cfg.m,
            evaluator,
        })
    }

    fn slab(&self, n: usize) -> Result<TimeSlab> {
        TimeSlab::new(n as f64 * self.dt, self.dt, self.m)
    }

    /// One pass over a slab from node estimates; returns every evaluator
    /// offset, so `[..m]` are the new node values and `[m-1..]` the next
    /// slab's predictions.
    fn sweep(&self, slab: &TimeSlab, nodes: &[StateVector], want_nodes: bool) -> Result<Vec<StateVector>> {
        let problem = self.problem;
        let t_mid = slab.t_start() + 0.5 * slab.dt();
        let u_mid = if problem.state_dependent() {
            barycentric_eval(slab, nodes, t_mid)?
        } else {
            nodes[0].clone()
        };
        let g_n = OperatorHandle::with_counter(problem.generator(t_mid, &u_mid), self.counter.clone());
        let frozen = FreezePoint { t: t_mid, u: &u_mid };
        let sources = nodes
            .iter()
            .enumerate()
            .map(|(j, u)| effective_source(problem, slab.node(j), u, frozen, &g_n))
            .collect::<Result<Vec<_>>>()?;
        let src = cheb_to_taylor(&samples_to_cheb(&sources)?, slab.dt())?;
        let rec = recurrence_vectors(&g_n, &nodes[0], &src)?;
        let cheb = chebyshev_vectors(&g_n, self.evaluator.segment(), rec.last(), self.evaluator.k())?;
        let first = if want_nodes { 1 } else { self.m - 1 };
        let mut out: Vec<StateVector> = Vec::with_capacity(2 * self.m - 1);
        if !want_nodes {
            out.extend(std::iter::repeat_with(Vec::new).take(self.m - 1));
        } else {
            out.push(nodes[0].clone());
        }
        for idx in first..self.evaluator.taus().len() {
            let u = self.evaluator.eval(idx, &rec, &cheb);
            if !all_finite(&u) {
                return Err(Error::NonFinite("slab solution"));
            }
            out.push(u);
        }
        Ok(out)
    }

    fn first_step(&self, u0: &[Complex64], cfg: &PropagatorConfig) -> Result<FirstStep> {
        let start = self.counter.get();
        let slab = self.slab(0)?;
        let m = self.m;
        let mut nodes = vec![u0.to_vec(); m];
        let mut residuals = Vec::new();
        for sweep in 1..=cfg.max_first_step_iters {
            let mut out = self.sweep(&slab, &nodes, true)?;
            let residual = dist(&out[m - 1], &nodes[m - 1]);
            if !residual.is_finite() {
                return Err(Error::NonFinite("first-step residual"));
            }
            residuals.push(residual);
            let predicted = out.split_off(m - 1);
            out.push(predicted[0].clone());
            nodes = out;
            if residual <= cfg.eps {
                return Ok(FirstStep {
                    state: SlabState {
                        slab,
                        node_values: nodes,
                    },
                    predicted,
                    sweeps: sweep,
                    residuals,
                    matvecs: self.counter.get() - start,
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: cfg.max_first_step_iters,
            residual: residuals.last().copied().unwrap_or(f64::INFINITY),
        })
    }
}

/// Converges the first slab of a run with the given configuration.
pub fn first_step<P: EvolutionProblem + ?Sized>(
    problem: &P,
    u0: &[Complex64],
    t_final: f64,
    cfg: &PropagatorConfig,
) -> Result<FirstStep> {
    check_len(u0, problem.dim())?;
    let stepper = Stepper::new(problem, t_final, cfg)?;
    stepper.first_step(u0, cfg)
}

/// Propagates to `t_final` and keeps every accepted state.
pub fn propagate<P: EvolutionProblem + ?Sized>(
    problem: &P,
    u0: &[Complex64],
    t_final: f64,
    cfg: &PropagatorConfig,
) -> Result<Propagation> {
    let mut trajectory = Vec::with_capacity(cfg.steps + 1);
    let (final_state, stats) = propagate_with(problem, u0, t_final, cfg, |_, _, u| trajectory.push(u.to_vec()))?;
    Ok(Propagation {
        final_state,
        trajectory,
        stats,
    })
}

/// Propagates to `t_final`, calling `observer(n, t_n, u_n)` for each
/// accepted state including the initial one.
pub fn propagate_with<P: EvolutionProblem + ?Sized>(
    problem: &P,
    u0: &[Complex64],
    t_final: f64,
    cfg: &PropagatorConfig,
    mut observer: impl FnMut(usize, f64, &[Complex64]),
) -> Result<(StateVector, PropagationStats)> {
    check_len(u0, problem.dim())?;
    let stepper = Stepper::new(problem, t_final, cfg)?;
    let m = stepper.m;
    observer(0, 0.0, u0);

    let first = stepper.first_step(u0, cfg)?;
    let mut accepted = first.state.node_values[m - 1].clone();
    let mut predicted = first.predicted;
    observer(1, stepper.dt, &accepted);

    let mut max_gap: f64 = 0.0;
    for n in 1..cfg.steps {
        let slab = stepper.slab(n)?;
        predicted[0] = accepted;
        let mut out = stepper.sweep(&slab, &predicted, false)?;
        let corrected = std::mem::take(&mut out[m - 1]);
        let scale = norm(&corrected);
        if scale > 0.0 {
            max_gap = max_gap.max(dist(&corrected, &predicted[m - 1]) / scale);
        }
        let mut next = out.split_off(m - 1);
        next[0] = corrected;
        accepted = next[0].clone();
        predicted = next;
        observer(n + 1, (n + 1) as f64 * stepper.dt, &accepted);
    }

    let stats = PropagationStats {
        steps: cfg.steps,
        m,
        k: cfg.k,
        matvecs: stepper.counter.get(),
        first_step_sweeps: first.sweeps,
        first_step_residuals: first.residuals,
        max_junction_gap: max_gap,
    };
    Ok((accepted, stats))
}
