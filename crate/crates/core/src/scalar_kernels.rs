//! The `f_m(z, t)` family and its Chebyshev expansion over a segment of the
//! imaginary axis.
//!
//! `f_m(z, t) = z^{-m} (e^{zt} - sum_{j<m} (zt)^j / j!)`, with the limit
//! `t^m / m!` at `z = 0`. Direct evaluation cancels badly for small `|zt|`, so
//! below `|zt| <= m/2` the series `t^m sum_j (zt)^j / (m+j)!` is used instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest order accepted by [`FmOrder::new`].
pub const MAX_FM_ORDER: u32 = 20;

/// Default relative tail tolerance for [`fm_cheb_coeffs`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-11;

/// Default ratio between sample points and expansion terms.
pub const DEFAULT_OVERSAMPLING: usize = 4;

const TAYLOR_REL_CUTOFF: f64 = 1e-17;
const TAYLOR_MAX_TERMS: usize = 60;

/// Order `m >= 1` of `f_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FmOrder(u32);

impl FmOrder {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_FM_ORDER {
            return Err(Error::InvalidParameter(format!(
                "f_m order must be in 1..={MAX_FM_ORDER}, got {m}"
            )));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `|zt|` at or below which the series branch is used.
    pub fn switch_threshold(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl TryFrom<usize> for FmOrder {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        u32::try_from(m)
            .map_err(|_| Error::InvalidParameter(format!("f_m order {m} out of range")))
            .and_then(FmOrder::new)
    }
}

/// The segment `i[a, b]` of the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSegment {
    a: f64,
    b: f64,
}

impl SpectralSegment {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("spectral segment"));
        }
        if a >= b {
            return Err(Error::DegenerateSegment { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Maps `x in [-1, 1]` to `z = i((b - a)x + (a + b))/2` on the segment.
    pub fn z_at(&self, x: f64) -> Complex64 {
        Complex64::new(0.0, self.half_width() * x + self.center())
    }

    /// Both endpoints scaled by `factor` (so the segment grows away from zero
    /// on each side it extends to).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.a * factor, self.b * factor)
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.a <= lambda && lambda <= self.b
    }
}

/// Chebyshev coefficients of `x -> f_m(z(x), t)` over a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoeffSet {
    pub coefficients: Vec<Complex64>,
    pub segment: SpectralSegment,
    pub t: f64,
    pub m: FmOrder,
}

impl ChebCoeffSet {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `|c_{k-1}| / max_n |c_n|`, zero when every coefficient vanishes.
    pub fn tail_ratio(&self) -> f64 {
        tail_ratio(&self.coefficients)
    }

    /// Clenshaw evaluation of the expansion at `x in [-1, 1]`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients.first().copied().unwrap_or_default() + b1 * x - b2
    }
}

fn tail_ratio(c: &[Complex64]) -> f64 {
    let max = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    match c.last() {
        Some(last) if max > 0.0 => last.norm() / max,
        _ => 0.0,
    }
}

/// Evaluates `f_m(z, t)` for `t >= 0`.
pub fn fm_scalar(z: Complex64, t: f64, m: FmOrder) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite() && t.is_finite()) {
        return Err(Error::NonFinite("f_m argument"));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("f_m needs t >= 0, got {t}")));
    }
    let zt = z * t;
    if zt.norm() <= m.switch_threshold() {
        Ok(fm_series(zt, t, m.get()))
    } else {
        Ok(fm_direct(z, zt, m.get()))
    }
}

/// Evaluation route for [`fm_scalar_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmBranch {
    /// `t^m sum_j (zt)^j / (m+j)!`
    Series,
    /// `z^{-m} (e^{zt} - sum_{j<m} (zt)^j / j!)`; undefined at `z = 0`.
    Direct,
}

/// `f_m(z, t)` through a fixed branch, bypassing the switch.
pub fn fm_scalar_with(z: Complex64, t: f64, m: FmOrder, branch: FmBranch) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite() && t.is_finite()) {
        return Err(Error::NonFinite("f_m argument"));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("f_m needs t >= 0, got {t}")));
    }
    let zt = z * t;
    match branch {
        FmBranch::Series => Ok(fm_series(zt, t, m.get())),
        FmBranch::Direct if z.norm() == 0.0 => Err(Error::InvalidParameter(
            "direct f_m branch needs z != 0".into(),
        )),
        FmBranch::Direct => Ok(fm_direct(z, zt, m.get())),
    }
}

fn fm_series(zt: Complex64, t: f64, m: u32) -> Complex64 {
    let mut term = Complex64::new(1.0 / factorial(m), 0.0);
    let mut sum = term;
    for j in 1..TAYLOR_MAX_TERMS {
        term *= zt / (m as f64 + j as f64);
        if term.norm() < TAYLOR_REL_CUTOFF * sum.norm() {
            break;
        }
        sum += term;
    }
    sum * t.powi(m as i32)
}

fn fm_direct(z: Complex64, zt: Complex64, m: u32) -> Complex64 {
    let mut partial = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for j in 0..m {
        partial += term;
        term *= zt / (j as f64 + 1.0);
    }
    (zt.exp() - partial) / z.powu(m)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Chebyshev coefficients `c_0..c_{k-1}` of `f_m(z, t)` for `z` on `segment`.
///
/// Samples `fm_scalar` at `oversampling * k` Chebyshev (first-kind) points and
/// projects with a discrete cosine transform. `tail_tol = None` skips the tail
/// check; otherwise [`Error::TailTooLarge`] is returned when the last
/// coefficient is not small relative to the largest.
pub fn fm_cheb_coeffs(
    segment: SpectralSegment,
    t: f64,
    m: FmOrder,
    k: usize,
    oversampling: usize,
    tail_tol: Option<f64>,
) -> Result<ChebCoeffSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if oversampling < 4 {
        return Err(Error::InvalidParameter(format!(
            "oversampling must be at least 4, got {oversampling}"
        )));
    }
    let samples = oversampling * k;
    let theta: Vec<f64> = (0..samples)
        .map(|q| PI * (q as f64 + 0.5) / samples as f64)
        .collect();
    let values = theta
        .iter()
        .map(|&th| fm_scalar(segment.z_at(th.cos()), t, m))
        .collect::<Result<Vec<_>>>()?;

    let norm = 2.0 / samples as f64;
    let mut coefficients: Vec<Complex64> = (0..k)
        .map(|n| {
            values
                .iter()
                .zip(&theta)
                .map(|(v, th)| v * (n as f64 * th).cos())
                .sum::<Complex64>()
                * norm
        })
        .collect();
    coefficients[0] *= 0.5;

    let set = ChebCoeffSet {
        coefficients,
        segment,
        t,
        m,
    };
    if let Some(tolerance) = tail_tol {
        let ratio = set.tail_ratio();
        if ratio > tolerance {
            return Err(Error::TailTooLarge { t, ratio, tolerance });
        }
    }
    Ok(set)
}
