use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::zeros;
use crate::operators::{fourier_spectral_bounds, LinearOperator, ModelDescriptor, OperatorHandle};
use crate::scalar_kernels::SpectralSegment;
use crate::semiglobal::{EvolutionProblem, FreezePoint};
use crate::{Error, Result, StateVector};

use super::grid::FourierGrid;
use super::ground_state::{gpe_ground_state, GroundState, GroundStateConfig};

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

/// `d/dx` with the Nyquist mode dropped.
#[derive(Debug, Clone)]
pub struct DerivativeOperator {
    grid: Arc<FourierGrid>,
}

impl DerivativeOperator {
    pub fn new(grid: Arc<FourierGrid>) -> Self {
        Self { grid }
    }
}

impl LinearOperator for DerivativeOperator {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn apply_to(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(x);
        let nyquist = self.grid.n() / 2;
        self.grid.apply_multiplier(out, |k, j| {
            if j == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        });
    }
}

/// `H = -1/2 d^2/dr^2 + V(r)` for a real potential sampled on the grid.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Arc<FourierGrid>,
    potential: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(grid: Arc<FourierGrid>, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.n() {
            return Err(Error::DimensionMismatch {
                expected: grid.n(),
                found: potential.len(),
            });
        }
        Ok(Self { grid, potential })
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    /// `<v, H v> / <v, v>`
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mut hv = zeros(v.len());
        self.apply_to(v, &mut hv);
        let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }
}

impl LinearOperator for Hamiltonian {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn apply_to(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(x);
        self.grid.apply_multiplier(out, |k, _| Complex64::new(0.5 * k * k, 0.0));
        for ((o, xi), v) in out.iter_mut().zip(x).zip(&self.potential) {
            *o += xi * v;
        }
    }
}

/// `G = -i H`.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    h: Hamiltonian,
}

impl SchrodingerOperator {
    pub fn new(h: Hamiltonian) -> Self {
        Self { h }
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }
}

impl LinearOperator for SchrodingerOperator {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply_to(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.h.apply_to(x, out);
        for o in out.iter_mut() {
            *o *= MINUS_I;
        }
    }
}

/// `u_t = u_x + s(x, t)` on `[0, 2 pi)` with exact solution
/// `u = sin(t) sin(6x) + sin(2t) cos(10x)`.
#[derive(Debug, Clone)]
pub struct Advection {
    grid: Arc<FourierGrid>,
    op: Arc<DerivativeOperator>,
    segment: SpectralSegment,
}

pub fn advection_exact(x: f64, t: f64) -> f64 {
    t.sin() * (6.0 * x).sin() + (2.0 * t).sin() * (10.0 * x).cos()
}

/// `u_t - u_x` of [`advection_exact`].
pub fn advection_source(x: f64, t: f64) -> f64 {
    t.cos() * (6.0 * x).sin() + 2.0 * (2.0 * t).cos() * (10.0 * x).cos() - 6.0 * t.sin() * (6.0 * x).cos()
        + 10.0 * (2.0 * t).sin() * (10.0 * x).sin()
}

impl Advection {
    pub fn new(n: usize) -> Result<Self> {
        if n < 32 {
            return Err(Error::InvalidParameter(format!(
                "advection needs n >= 32 to resolve cos(10x), got {n}"
            )));
        }
        let grid = Arc::new(FourierGrid::new(n, 0.0, 2.0 * PI)?);
        Ok(Self {
            op: Arc::new(DerivativeOperator::new(grid.clone())),
            segment: fourier_spectral_bounds(ModelDescriptor::Advection { n })?,
            grid,
        })
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    /// A fresh counted handle on `G = d/dx`.
    pub fn handle(&self) -> OperatorHandle {
        OperatorHandle::with_counter(self.op.clone(), Default::default())
    }

    pub fn source(&self, t: f64) -> StateVector {
        self.grid.sample(|x| Complex64::new(advection_source(x, t), 0.0))
    }

    pub fn exact(&self, t: f64) -> StateVector {
        self.grid.sample(|x| Complex64::new(advection_exact(x, t), 0.0))
    }

    pub fn initial_state(&self) -> StateVector {
        self.exact(0.0)
    }
}

pub fn advection_problem(n: usize) -> Result<Advection> {
    Advection::new(n)
}

impl EvolutionProblem for Advection {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn spectral_segment(&self) -> SpectralSegment {
        self.segment
    }

    fn generator(&self, _t: f64, _u: &[Complex64]) -> Arc<dyn LinearOperator> {
        self.op.clone()
    }

    fn add_source(&self, t: f64, _u: &[Complex64], out: &mut [Complex64]) {
        for (o, &x) in out.iter_mut().zip(self.grid.points()) {
            *o += advection_source(x, t);
        }
    }

    fn add_generator_difference(
        &self,
        _t: f64,
        _u: &[Complex64],
        _frozen: FreezePoint<'_>,
        _g_n: &OperatorHandle,
        _out: &mut [Complex64],
    ) -> Result<()> {
        Ok(())
    }
}

/// `H(t) = -1/2 d^2/dr^2 + 1/2 r^2 + r sin^2(pi t / T) cos t`, `psi_0 = e^{-r^2}`.
#[derive(Debug, Clone)]
pub struct DrivenOscillator {
    grid: Arc<FourierGrid>,
    period: f64,
    segment: SpectralSegment,
}

impl DrivenOscillator {
    pub const N: usize = 128;
    pub const R_MAX: f64 = 10.0;
    pub const T: f64 = 15.0;

    pub fn new(n: usize, r_max: f64, period: f64) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::InvalidParameter(format!("field period must be > 0, got {period}")));
        }
        let grid = Arc::new(FourierGrid::symmetric(n, r_max)?);
        // |r f(t)| <= r_max; the trap plus field is bounded below by -1/2.
        let segment = fourier_spectral_bounds(ModelDescriptor::Schrodinger {
            n,
            r_max,
            v_min: -0.5,
            v_max: 0.5 * r_max * r_max + r_max,
        })?;
        Ok(Self {
            grid,
            period,
            segment,
        })
    }

    pub fn standard() -> Result<Self> {
        Self::new(Self::N, Self::R_MAX, Self::T)
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `sin^2(pi t / T) cos t`
    pub fn field(&self, t: f64) -> f64 {
        (PI * t / self.period).sin().powi(2) * t.cos()
    }

    pub fn potential(&self, t: f64) -> Vec<f64> {
        let f = self.field(t);
        self.grid.points().iter().map(|r| 0.5 * r * r + r * f).collect()
    }

    pub fn hamiltonian(&self, t: f64) -> Hamiltonian {
        Hamiltonian::new(self.grid.clone(), self.potential(t)).expect("grid-sized potential")
    }

    pub fn initial_state(&self) -> StateVector {
        self.grid.sample(|r| Complex64::new((-r * r).exp(), 0.0))
    }
}

pub fn oscillator_problem() -> Result<DrivenOscillator> {
    DrivenOscillator::standard()
}

impl EvolutionProblem for DrivenOscillator {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn spectral_segment(&self) -> SpectralSegment {
        self.segment
    }

    fn generator(&self, t: f64, _u: &[Complex64]) -> Arc<dyn LinearOperator> {
        Arc::new(SchrodingerOperator::new(self.hamiltonian(t)))
    }

    fn add_generator_difference(
        &self,
        t: f64,
        u: &[Complex64],
        frozen: FreezePoint<'_>,
        _g_n: &OperatorHandle,
        out: &mut [Complex64],
    ) -> Result<()> {
        let df = self.field(t) - self.field(frozen.t);
        for ((o, x), r) in out.iter_mut().zip(u).zip(self.grid.points()) {
            *o += MINUS_I * x * (r * df);
        }
        Ok(())
    }
}

/// `H(psi) = -1/2 d^2/dr^2 + 1/2 r^2 + g |psi|^2` with a boosted ground state
/// `psi_0 = e^{i p r} v_0`.
#[derive(Debug, Clone)]
pub struct GrossPitaevskii {
    grid: Arc<FourierGrid>,
    coupling: f64,
    trap: Vec<f64>,
    ground: GroundState,
    psi0: StateVector,
    segment: SpectralSegment,
}

impl GrossPitaevskii {
    pub const N: usize = 128;
    pub const T: f64 = 10.0;
    pub const BOOST: f64 = 8.0;

    pub fn r_max() -> f64 {
        8.0 * PI.sqrt()
    }

    pub fn new(n: usize, r_max: f64, coupling: f64, boost: f64, ground: &GroundStateConfig) -> Result<Self> {
        let grid = Arc::new(FourierGrid::symmetric(n, r_max)?);
        let ground = gpe_ground_state(&grid, coupling, ground)?;
        let psi0: StateVector = grid
            .points()
            .iter()
            .zip(&ground.state)
            .map(|(&r, v)| Complex64::new(0.0, boost * r).exp() * v)
            .collect();
        let peak = psi0.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max);
        let segment = fourier_spectral_bounds(ModelDescriptor::Schrodinger {
            n,
            r_max,
            v_min: 0.0,
            v_max: 0.5 * r_max * r_max + coupling * peak,
        })?;
        let trap = grid.points().iter().map(|r| 0.5 * r * r).collect();
        Ok(Self {
            grid,
            coupling,
            trap,
            ground,
            psi0,
            segment,
        })
    }

    pub fn standard() -> Result<Self> {
        Self::new(Self::N, Self::r_max(), 1.0, Self::BOOST, &GroundStateConfig::default())
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn ground_state(&self) -> &GroundState {
        &self.ground
    }

    pub fn initial_state(&self) -> StateVector {
        self.psi0.clone()
    }

    pub fn hamiltonian(&self, psi: &[Complex64]) -> Hamiltonian {
        let potential = self
            .trap
            .iter()
            .zip(psi)
            .map(|(v, p)| v + self.coupling * p.norm_sqr())
            .collect();
        Hamiltonian::new(self.grid.clone(), potential).expect("grid-sized potential")
    }
}

pub fn gpe_problem() -> Result<GrossPitaevskii> {
    GrossPitaevskii::standard()
}

impl EvolutionProblem for GrossPitaevskii {
    fn dim(&self) -> usize {
        self.grid.n()
    }

    fn spectral_segment(&self) -> SpectralSegment {
        self.segment
    }

    fn state_dependent(&self) -> bool {
        true
    }

    fn generator(&self, _t: f64, u: &[Complex64]) -> Arc<dyn LinearOperator> {
        Arc::new(SchrodingerOperator::new(self.hamiltonian(u)))
    }

    fn add_generator_difference(
        &self,
        _t: f64,
        u: &[Complex64],
        frozen: FreezePoint<'_>,
        _g_n: &OperatorHandle,
        out: &mut [Complex64],
    ) -> Result<()> {
        for ((o, x), p) in out.iter_mut().zip(u).zip(frozen.u) {
            *o += MINUS_I * x * (self.coupling * (x.norm_sqr() - p.norm_sqr()));
        }
        Ok(())
    }
}
