//! Run configuration, execution and reporting behind the `sgbench` binary.

mod cache;
mod sweep;

use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use semiglobal::linalg::rel_l2_error;
use semiglobal::physics_models::{Advection, DrivenOscillator, GrossPitaevskii};
use semiglobal::reference::{rk45_problem, rk4_problem, Rk45Config};
use semiglobal::semiglobal::{propagate_with, solve_const_g, EvolutionProblem, PropagatorConfig, DEFAULT_EPS};
use semiglobal::{Complex64, StateVector};

pub use cache::{compute_reference, reference_description, reference_steps, ReferenceCache};
pub use sweep::{expand, parse_sweep, SweepAxis, SweepKey};

/// Grid size used for the advection example.
pub const ADVECTION_N: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Advection,
    Oscillator,
    Gpe,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::Advection => "advection",
            Example::Oscillator => "oscillator",
            Example::Gpe => "gpe",
        }
    }

    pub fn default_final_time(self) -> f64 {
        match self {
            Example::Advection => 5.0,
            Example::Oscillator => DrivenOscillator::T,
            Example::Gpe => GrossPitaevskii::T,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Semiglobal,
    Rk4,
    Rk45,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Semiglobal => "semiglobal",
            Method::Rk4 => "rk4",
            Method::Rk45 => "rk45",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl BenchError {
    /// Process exit code; numerical failures are reported per row instead.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: Example,
    pub method: Method,
    pub steps: Option<usize>,
    /// Single-slab solve over `[0, T]`; constant-generator examples only.
    pub one_shot: bool,
    pub m: usize,
    pub k: usize,
    pub t_final: f64,
    pub eps: f64,
    /// RK45 relative and absolute tolerance.
    pub tol: f64,
    pub tail_tol: Option<f64>,
}

impl RunConfig {
    pub fn new(example: Example, method: Method) -> Self {
        Self {
            example,
            method,
            steps: None,
            one_shot: false,
            m: 7,
            k: 7,
            t_final: example.default_final_time(),
            eps: DEFAULT_EPS,
            tol: 1e-6,
            tail_tol: None,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_order(mut self, m: usize, k: usize) -> Self {
        self.m = m;
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("--T must be finite and > 0, got {}", self.t_final));
        }
        if self.steps == Some(0) {
            return bad("--steps must be >= 1".into());
        }
        match self.method {
            Method::Semiglobal => {
                if !(2..=16).contains(&self.m) {
                    return bad(format!("--m must be in 2..=16, got {}", self.m));
                }
                if self.k < 1 {
                    return bad("--k must be >= 1".into());
                }
                if !(self.eps > 0.0) {
                    return bad(format!("--eps must be > 0, got {}", self.eps));
                }
                match (self.steps, self.one_shot) {
                    (Some(_), true) => return bad("--steps and --one-shot are exclusive".into()),
                    (None, false) => return bad("semiglobal needs --steps or --one-shot".into()),
                    (None, true) if self.example != Example::Advection => {
                        return bad("--one-shot needs a constant generator (advection)".into())
                    }
                    _ => {}
                }
            }
            Method::Rk4 => {
                if self.one_shot || self.steps.is_none() {
                    return bad("rk4 needs --steps".into());
                }
            }
            Method::Rk45 => {
                if self.one_shot || self.steps.is_some() {
                    return bad("rk45 chooses its own steps; set --tol instead".into());
                }
                if !(self.tol > 0.0) {
                    return bad(format!("--tol must be > 0, got {}", self.tol));
                }
            }
        }
        if let Some(t) = self.tail_tol {
            if !(t > 0.0) {
                return bad(format!("--tail-tol must be > 0, got {t}"));
            }
        }
        Ok(())
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub example: Example,
    pub steps: usize,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub matvecs: Option<u64>,
    pub rel_l2_error: Option<f64>,
    pub wall_seconds: f64,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

struct Outcome {
    steps: usize,
    matvecs: u64,
    state: StateVector,
}

fn integrate<P: EvolutionProblem>(p: &P, u0: &[Complex64], cfg: &RunConfig) -> semiglobal::Result<Outcome> {
    match cfg.method {
        Method::Semiglobal => {
            let steps = cfg.steps.expect("validated");
            let pc = PropagatorConfig::new(cfg.m, cfg.k, steps).with_tail_tol(cfg.tail_tol).with_eps(cfg.eps);
            let (state, stats) = propagate_with(p, u0, cfg.t_final, &pc, |_, _, _| {})?;
            Ok(Outcome {
                steps,
                matvecs: stats.matvecs,
                state,
            })
        }
        Method::Rk4 => {
            let r = rk4_problem(p, u0, cfg.t_final, cfg.steps.expect("validated"))?;
            Ok(Outcome {
                steps: r.steps,
                matvecs: r.matvecs,
                state: r.state,
            })
        }
        Method::Rk45 => {
            let r = rk45_problem(p, u0, cfg.t_final, &Rk45Config::with_tol(cfg.tol))?;
            Ok(Outcome {
                steps: r.rk45.map_or(r.steps, |s| s.accepted),
                matvecs: r.matvecs,
                state: r.state,
            })
        }
    }
}

fn advection_one_shot(p: &Advection, cfg: &RunConfig) -> semiglobal::Result<Outcome> {
    let g = p.handle();
    let out = solve_const_g(
        &g,
        p.spectral_segment(),
        &p.initial_state(),
        |t| p.source(t),
        cfg.t_final,
        cfg.m,
        cfg.k,
        cfg.tail_tol,
    )?;
    Ok(Outcome {
        steps: 1,
        matvecs: out.matvecs,
        state: out.state,
    })
}

/// Builds the model, runs it and times the integration only.
fn execute(cfg: &RunConfig) -> semiglobal::Result<(Outcome, f64, Option<StateVector>)> {
    match cfg.example {
        Example::Advection => {
            let p = Advection::new(ADVECTION_N)?;
            let start = Instant::now();
            let out = if cfg.one_shot {
                advection_one_shot(&p, cfg)?
            } else {
                integrate(&p, &p.initial_state(), cfg)?
            };
            Ok((out, start.elapsed().as_secs_f64(), Some(p.exact(cfg.t_final))))
        }
        Example::Oscillator => {
            let p = DrivenOscillator::standard()?;
            let start = Instant::now();
            let out = integrate(&p, &p.initial_state(), cfg)?;
            Ok((out, start.elapsed().as_secs_f64(), None))
        }
        Example::Gpe => {
            let p = GrossPitaevskii::standard()?;
            let start = Instant::now();
            let out = integrate(&p, &p.initial_state(), cfg)?;
            Ok((out, start.elapsed().as_secs_f64(), None))
        }
    }
}

/// Runs one configuration. Numerical failures become a failed row; only
/// invalid configurations and cache i/o are errors.
pub fn run(cfg: &RunConfig, cache: &ReferenceCache) -> Result<RunReport, BenchError> {
    cfg.validate()?;
    let (m, k) = match cfg.method {
        Method::Semiglobal => (Some(cfg.m), Some(cfg.k)),
        _ => (None, None),
    };
    let mut report = RunReport {
        method: cfg.method,
        example: cfg.example,
        steps: cfg.steps.unwrap_or(usize::from(cfg.one_shot)),
        m,
        k,
        matvecs: None,
        rel_l2_error: None,
        wall_seconds: 0.0,
        status: "ok".into(),
    };
    let (out, secs, exact) = match execute(cfg) {
        Ok(x) => x,
        Err(e) => {
            report.status = format!("failed: {e}");
            return Ok(report);
        }
    };
    report.steps = out.steps;
    report.matvecs = Some(out.matvecs);
    report.wall_seconds = secs;
    let reference = match exact {
        Some(u) => u,
        None => match cache.get(cfg.example, cfg.t_final)? {
            Ok(u) => u.as_ref().clone(),
            Err(e) => {
                report.status = format!("failed: reference: {e}");
                return Ok(report);
            }
        },
    };
    let err = rel_l2_error(&out.state, &reference);
    report.rel_l2_error = Some(err);
    if !err.is_finite() {
        report.status = "failed: non-finite error".into();
    }
    Ok(report)
}

/// Validates every configuration, then runs them, in parallel if asked.
/// Output order follows input order.
pub fn run_all(configs: &[RunConfig], cache: &ReferenceCache, parallel: bool) -> Result<Vec<RunReport>, BenchError> {
    use rayon::prelude::*;
    for c in configs {
        c.validate()?;
    }
    if parallel {
        configs.par_iter().map(|c| run(c, cache)).collect()
    } else {
        configs.iter().map(|c| run(c, cache)).collect()
    }
}

pub const CSV_HEADER: &str = "method,example,steps,m,k,matvecs,rel_l2_error,wall_seconds,status";

pub fn write_csv<W: Write>(reports: &[RunReport], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(|e| BenchError::Output(e.to_string()))?;
    for r in reports {
        w.serialize(r).map_err(|e| BenchError::Output(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunReport>, BenchError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<RunReport>, _>>()
        .map_err(|e| BenchError::Output(e.to_string()))
}

pub fn write_json<W: Write>(reports: &[RunReport], mut out: W) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(&mut out, reports).map_err(|e| BenchError::Output(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}
