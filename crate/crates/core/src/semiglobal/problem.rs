use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{axpy, zeros};
use crate::operators::{LinearOperator, MatvecCounter, OperatorHandle};
use crate::scalar_kernels::SpectralSegment;
use crate::{Result, StateVector};

/// Time and state at which a slab's generator `G_n` is frozen.
#[derive(Debug, Clone, Copy)]
pub struct FreezePoint<'a> {
    pub t: f64,
    pub u: &'a [Complex64],
}

/// A system `u' = G(t, u) u + s(t, u)`.
pub trait EvolutionProblem {
    fn dim(&self) -> usize;

    /// Segment `i[a, b]` enclosing the spectrum of every generator the run
    /// will freeze.
    fn spectral_segment(&self) -> SpectralSegment;

    /// `true` when `G` depends on `u`; the stepper then freezes at the
    /// interpolated midpoint state.
    fn state_dependent(&self) -> bool {
        false
    }

    /// `G(t, u)` as an uncounted operator.
    fn generator(&self, t: f64, u: &[Complex64]) -> Arc<dyn LinearOperator>;

    /// Adds the external source `s(t, u)` into `out`.
    fn add_source(&self, _t: f64, _u: &[Complex64], _out: &mut [Complex64]) {}

    /// Adds `(G(t, u) - G_n) u` into `out`, where `g_n` was frozen at
    /// `frozen`.
    ///
    /// The default applies both generators, costing two counted matvecs.
    /// Models where the difference is a cheap diagonal override this.
    fn add_generator_difference(
        &self,
        t: f64,
        u: &[Complex64],
        _frozen: FreezePoint<'_>,
        g_n: &OperatorHandle,
        out: &mut [Complex64],
    ) -> Result<()> {
        let g = OperatorHandle::with_counter(self.generator(t, u), g_n.counter().clone());
        let gu = g.apply(u)?;
        let gnu = g_n.apply(u)?;
        for ((o, a), b) in out.iter_mut().zip(&gu).zip(&gnu) {
            *o += a - b;
        }
        Ok(())
    }

    /// `G(t, u) u + s(t, u)` with one counted matvec.
    fn rhs(&self, t: f64, u: &[Complex64], counter: &MatvecCounter) -> Result<StateVector> {
        let g = OperatorHandle::with_counter(self.generator(t, u), counter.clone());
        let mut out = g.apply(u)?;
        self.add_source(t, u, &mut out);
        Ok(out)
    }
}

/// `s_n(t) = s(t, u) + (G(t, u) - G_n) u`.
pub fn effective_source<P: EvolutionProblem + ?Sized>(
    problem: &P,
    t: f64,
    u: &[Complex64],
    frozen: FreezePoint<'_>,
    g_n: &OperatorHandle,
) -> Result<StateVector> {
    let mut out = zeros(problem.dim());
    problem.add_source(t, u, &mut out);
    problem.add_generator_difference(t, u, frozen, g_n, &mut out)?;
    Ok(out)
}

/// A constant generator with an explicit time-dependent source.
pub struct ConstantGenerator<S> {
    op: Arc<dyn LinearOperator>,
    segment: SpectralSegment,
    source: S,
}

impl<S> ConstantGenerator<S>
where
    S: Fn(f64) -> StateVector,
{
    pub fn new(op: Arc<dyn LinearOperator>, segment: SpectralSegment, source: S) -> Self {
        Self {
            op,
            segment,
            source,
        }
    }
}

impl<S> EvolutionProblem for ConstantGenerator<S>
where
    S: Fn(f64) -> StateVector,
{
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn spectral_segment(&self) -> SpectralSegment {
        self.segment
    }

    fn generator(&self, _t: f64, _u: &[Complex64]) -> Arc<dyn LinearOperator> {
        self.op.clone()
    }

    fn add_source(&self, t: f64, _u: &[Complex64], out: &mut [Complex64]) {
        axpy(Complex64::new(1.0, 0.0), &(self.source)(t), out);
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
