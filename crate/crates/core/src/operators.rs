//! Matrix-free operators with matvec accounting.
//!
//! Models implement [`LinearOperator`]; propagators only ever see an
//! [`OperatorHandle`], which forwards to the operator and bumps a shared
//! [`MatvecCounter`] once per application.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{check_len, zeros};
use crate::scalar_kernels::SpectralSegment;
use crate::{Error, Result, StateVector};

/// Action of a linear operator on a vector.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `out`; both slices have length `dim()`.
    fn apply_to(&self, x: &[Complex64], out: &mut [Complex64]);
}

/// Monotone count of operator applications, shareable between handles.
#[derive(Debug, Clone, Default)]
pub struct MatvecCounter(Arc<AtomicU64>);

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

/// A counted operator.
#[derive(Clone)]
pub struct OperatorHandle {
    op: Arc<dyn LinearOperator>,
    counter: MatvecCounter,
}

impl std::fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("dim", &self.dim())
            .field("matvecs", &self.matvecs())
            .finish()
    }
}

impl OperatorHandle {
    pub fn new(op: impl LinearOperator + 'static) -> Self {
        Self::with_counter(Arc::new(op), MatvecCounter::new())
    }

    pub fn with_counter(op: Arc<dyn LinearOperator>, counter: MatvecCounter) -> Self {
        Self { op, counter }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn counter(&self) -> &MatvecCounter {
        &self.counter
    }

    pub fn matvecs(&self) -> u64 {
        self.counter.get()
    }

    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_len(v, self.dim())?;
        check_len(out, self.dim())?;
        self.counter.bump();
        self.op.apply_to(v, out);
        Ok(())
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<StateVector> {
        let mut out = zeros(self.dim());
        self.apply_into(v, &mut out)?;
        Ok(out)
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_to(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in self.data.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn dense_operator(matrix: DenseMatrix) -> OperatorHandle {
    OperatorHandle::new(matrix)
}

/// `X = (-2i G - (a+b) I) / (b - a)`, which maps eigenvalues `i lambda` of
/// `G` with `lambda in [a, b]` into `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ScaledOperator<'a> {
    base: &'a OperatorHandle,
    segment: SpectralSegment,
}

impl<'a> ScaledOperator<'a> {
    pub fn new(base: &'a OperatorHandle, segment: SpectralSegment) -> Result<Self> {
        let (a, b) = (segment.a(), segment.b());
        if b - a <= 0.0 {
            return Err(Error::DegenerateSegment { a, b });
        }
        Ok(Self { base, segment })
    }

    pub fn segment(&self) -> SpectralSegment {
        self.segment
    }

    /// One base matvec.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.base.apply_into(v, out)?;
        let (a, b) = (self.segment.a(), self.segment.b());
        let inv = 1.0 / (b - a);
        let mul = Complex64::new(0.0, -2.0 * inv);
        let shift = (a + b) * inv;
        for (o, x) in out.iter_mut().zip(v) {
            *o = mul * *o - x * shift;
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<StateVector> {
        let mut out = zeros(v.len());
        self.apply_into(v, &mut out)?;
        Ok(out)
    }
}

pub fn scaled_apply(sop: &ScaledOperator<'_>, v: &[Complex64]) -> Result<StateVector> {
    sop.apply(v)
}

/// Safety factor applied to both ends of every analytic enclosure.
pub const SPECTRAL_MARGIN: f64 = 1.05;

/// Analytically bounded generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelDescriptor {
    /// `G = d/dx` on `n` Fourier points of `[0, 2 pi)`.
    Advection { n: usize },
    /// `G = -i(-1/2 d^2/dr^2 + V)` on `n` points over `[-r_max, r_max)`, with
    /// `v_min <= V <= v_max` for the duration of the run.
    Schrodinger {
        n: usize,
        r_max: f64,
        v_min: f64,
        v_max: f64,
    },
}

/// Segment enclosing the spectrum of the described generator, widened by
/// [`SPECTRAL_MARGIN`].
pub fn fourier_spectral_bounds(model: ModelDescriptor) -> Result<SpectralSegment> {
    let raw = match model {
        ModelDescriptor::Advection { n } => {
            let k = n as f64 / 2.0;
            SpectralSegment::new(-k, k)?
        }
        ModelDescriptor::Schrodinger {
            n,
            r_max,
            v_min,
            v_max,
        } => {
            let dr = 2.0 * r_max / n as f64;
            let k_max = PI / dr;
            let kinetic = 0.5 * k_max * k_max;
            SpectralSegment::new(-(kinetic + v_max), -v_min)?
        }
    };
    raw.scaled(SPECTRAL_MARGIN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_zero() {
        let v = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0)];
        let id = dense_operator(DenseMatrix::identity(3));
        assert_eq!(id.apply(&v).unwrap(), v);
        assert_eq!(id.matvecs(), 1);
        let zero = dense_operator(DenseMatrix::from_fn(3, |_, _| c(0.0, 0.0)));
        assert!(zero.apply(&v).unwrap().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn column_extraction() {
        let m = DenseMatrix::from_fn(4, |i, j| c(i as f64, j as f64 * 0.5));
        let op = dense_operator(m.clone());
        let mut e2 = vec![c(0.0, 0.0); 4];
        e2[2] = c(1.0, 0.0);
        let col = op.apply(&e2).unwrap();
        for i in 0..4 {
            assert_eq!(col[i], m.get(i, 2));
        }
    }

    #[test]
    fn small_dense_products() {
        let op = dense_operator(DenseMatrix::from_rows(vec![vec![c(2.0, 0.0)]]).unwrap());
        assert_eq!(op.apply(&[c(3.0, 0.0)]).unwrap(), vec![c(6.0, 0.0)]);
        let op = dense_operator(DenseMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]));
        assert_eq!(
            op.apply(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            vec![c(0.0, 1.0), c(0.0, -1.0)]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let op = dense_operator(DenseMatrix::identity(3));
        assert!(matches!(
            op.apply(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 3, found: 1 })
        ));
        assert_eq!(op.matvecs(), 0);
        assert!(DenseMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn shared_counter() {
        let counter = MatvecCounter::new();
        let a = OperatorHandle::with_counter(Arc::new(DenseMatrix::identity(2)), counter.clone());
        let b = OperatorHandle::with_counter(Arc::new(DenseMatrix::identity(2)), counter.clone());
        let v = [c(1.0, 0.0), c(0.0, 1.0)];
        a.apply(&v).unwrap();
        b.apply(&v).unwrap();
        b.apply(&v).unwrap();
        assert_eq!(counter.get(), 3);
    }

    #[test]
    fn scaled_operator_maps_endpoints() {
        let seg = SpectralSegment::new(-1.0, 1.0).unwrap();
        let v = vec![c(1.0, -1.0), c(0.25, 2.0)];
        // G = iI: eigenvalue i maps to 1
        let g = dense_operator(DenseMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 1.0)]));
        let x = ScaledOperator::new(&g, seg).unwrap();
        let out = scaled_apply(&x, &v).unwrap();
        for (a, b) in out.iter().zip(&v) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(g.matvecs(), 1);
        // G = 0: eigenvalue 0 maps to 0
        let zero = dense_operator(DenseMatrix::from_fn(2, |_, _| c(0.0, 0.0)));
        let x = ScaledOperator::new(&zero, seg).unwrap();
        assert!(x.apply(&v).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn analytic_bounds() {
        let seg = fourier_spectral_bounds(ModelDescriptor::Advection { n: 32 }).unwrap();
        assert!((seg.a() + 16.8).abs() < 1e-12 && (seg.b() - 16.8).abs() < 1e-12);

        let free = fourier_spectral_bounds(ModelDescriptor::Schrodinger {
            n: 128,
            r_max: 10.0,
            v_min: 0.0,
            v_max: 0.0,
        })
        .unwrap();
        let k_max = (PI * 128.0 / 20.0).powi(2) / 2.0;
        assert!((k_max - 202.1).abs() < 0.05);
        assert!((free.a() + 1.05 * k_max).abs() < 1e-9);
        assert!((free.a() + 212.2).abs() < 0.05);
        assert_eq!(free.b(), 0.0);

        let driven = fourier_spectral_bounds(ModelDescriptor::Schrodinger {
            n: 128,
            r_max: 10.0,
            v_min: -0.5,
            v_max: 60.0,
        })
        .unwrap();
        assert!((driven.a() + 1.05 * (k_max + 60.0)).abs() < 1e-9);
        assert!((driven.b() - 0.525).abs() < 1e-12);
    }
}
