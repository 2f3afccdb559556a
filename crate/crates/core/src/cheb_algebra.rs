//! Chebyshev–Lobatto time slabs and the transforms between node samples,
//! Chebyshev coefficients and the Taylor-like form `sum_j tau^j/j! s_j`.

use std::f64::consts::PI;


use crate::linalg::{axpy_real, zeros};
use crate::{Error, Result, StateVector};

/// Largest node count accepted by [`cheb_to_taylor`]; the Chebyshev to
/// monomial map loses roughly a factor 3 of accuracy per degree.
pub const MAX_TAYLOR_NODES: usize = 16;

/// One time interval `[t_start, t_start + dt]` with `m` Chebyshev–Lobatto
/// nodes `t_j = t_start + dt/2 (1 - y_j)`, `y_j = cos(j pi / (m-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSlab {
    t_start: f64,
    dt: f64,
    offsets: Vec<f64>,
}

impl TimeSlab {
    pub fn new(t_start: f64, dt: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "time slab needs at least 2 nodes, got {m}"
            )));
        }
        if !(dt > 0.0 && dt.is_finite() && t_start.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time slab needs finite t_start and dt > 0, got t_start={t_start}, dt={dt}"
            )));
        }
        let offsets = lobatto_points(m)
            .into_iter()
            .map(|y| 0.5 * dt * (1.0 - y))
            .collect();
        Ok(Self {
            t_start,
            dt,
            offsets,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.dt
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Node offsets `tau_j = t_j - t_start`, ascending from 0 to `dt`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.offsets.len() {
            self.t_end()
        } else {
            self.t_start + self.offsets[j]
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.node(j)).collect()
    }

    /// The following slab `[t_end, t_end + dt]`.
    pub fn next(&self) -> Self {
        Self {
            t_start: self.t_end(),
            dt: self.dt,
            offsets: self.offsets.clone(),
        }
    }
}

/// `y_j = cos(j pi / (m - 1))` for `j = 0..m`, written as a sine so that the
/// set is exactly antisymmetric.
pub fn lobatto_points(m: usize) -> Vec<f64> {
    let n = (m - 1) as f64;
    (0..m)
        .map(|j| {
            let arg = (n - 2.0 * j as f64) * PI / (2.0 * n);
            if 2 * j + 1 == m {
                0.0
            } else {
                arg.sin()
            }
        })
        .collect()
}

fn check_samples(values: &[StateVector]) -> Result<usize> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 node samples, got {}",
            values.len()
        )));
    }
    let n = values[0].len();
    for v in values {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    Ok(n)
}

/// `cos(n j pi / N)` with the angle reduced modulo `2N`.
fn lobatto_cos(n: usize, j: usize, big_n: usize) -> f64 {
    let r = (n * j) % (2 * big_n);
    (r as f64 * PI / big_n as f64).cos()
}

/// Type-I cosine transform of samples at the Lobatto nodes `y_j`.
///
/// The result `c_n` satisfies `f(y_j) = sum_n c_n T_n(y_j)` exactly.
pub fn samples_to_cheb(values: &[StateVector]) -> Result<Vec<StateVector>> {
    let dim = check_samples(values)?;
    let m = values.len();
    let big_n = m - 1;
    let mut coeffs = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = zeros(dim);
        for (j, v) in values.iter().enumerate() {
            let end = if j == 0 || j == big_n { 0.5 } else { 1.0 };
            axpy_real(end * lobatto_cos(n, j, big_n), v, &mut acc);
        }
        let end = if n == 0 || n == big_n { 0.5 } else { 1.0 };
        let w = end * 2.0 / big_n as f64;
        acc.iter_mut().for_each(|c| *c *= w);
        coeffs.push(acc);
    }
    Ok(coeffs)
}

/// Evaluates `sum_n c_n T_n(y_j)` at the Lobatto nodes (inverse of
/// [`samples_to_cheb`]).
pub fn cheb_to_samples(coeffs: &[StateVector]) -> Result<Vec<StateVector>> {
    let dim = check_samples(coeffs)?;
    let m = coeffs.len();
    let big_n = m - 1;
    Ok((0..m)
        .map(|j| {
            let mut acc = zeros(dim);
            for (n, c) in coeffs.iter().enumerate() {
                axpy_real(lobatto_cos(n, j, big_n), c, &mut acc);
            }
            acc
        })
        .collect())
}

/// Vectors `s_0..s_{m-1}` of the source representation
/// `s(tau) = sum_j tau^j / j! s_j`, `tau = t - t_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSourceSet {
    vectors: Vec<StateVector>,
}

impl TaylorSourceSet {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let n = first.len();
            if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad.len(),
                });
            }
        }
        Ok(Self { vectors })
    }

    /// `m` zero vectors of length `dim`.
    pub fn zero(m: usize, dim: usize) -> Self {
        Self {
            vectors: vec![zeros(dim); m],
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<StateVector> {
        self.vectors
    }

    /// `sum_j tau^j / j! s_j`.
    pub fn eval(&self, tau: f64) -> StateVector {
        let mut acc = zeros(self.dim());
        let mut w = 1.0;
        for (j, s) in self.vectors.iter().enumerate() {
            if j > 0 {
                w *= tau / j as f64;
            }
            axpy_real(w, s, &mut acc);
        }
        acc
    }
}

/// Monomial coefficients in `sigma` of `T_n(1 - 2 sigma)` for `n < m`.
fn shifted_chebyshev_monomials(m: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(m);
    polys.push(vec![1.0]);
    if m > 1 {
        polys.push(vec![1.0, -2.0]);
    }
    for n in 2..m {
        let prev = &polys[n - 1];
        let prev2 = &polys[n - 2];
        let mut p = vec![0.0; n + 1];
        for (i, &c) in prev.iter().enumerate() {
            p[i] += 2.0 * c;
            p[i + 1] -= 4.0 * c;
        }
        for (i, &c) in prev2.iter().enumerate() {
            p[i] -= c;
        }
        polys.push(p);
    }
    polys
}

/// Converts Chebyshev coefficients in `y = 1 - 2 tau/dt` into the Taylor-like
/// set, so that `sum_n c_n T_n(y(tau)) = sum_j tau^j/j! s_j` identically.
pub fn cheb_to_taylor(coeffs: &[StateVector], dt: f64) -> Result<TaylorSourceSet> {
    let m = coeffs.len();
    if m > MAX_TAYLOR_NODES {
        return Err(Error::Conditioning {
            m,
            max: MAX_TAYLOR_NODES,
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if m == 0 {
        return Ok(TaylorSourceSet { vectors: vec![] });
    }
    let dim = check_samples_or_single(coeffs)?;
    let polys = shifted_chebyshev_monomials(m);
    let mut vectors = Vec::with_capacity(m);
    // s_j = j! / dt^j * sum_n c_n [sigma^j] T_n(1 - 2 sigma)
    let mut scale = 1.0;
    for j in 0..m {
        if j > 0 {
            scale *= j as f64 / dt;
        }
        let mut acc = zeros(dim);
        for (n, c) in coeffs.iter().enumerate().skip(j) {
            axpy_real(polys[n][j], c, &mut acc);
        }
        acc.iter_mut().for_each(|v| *v *= scale);
        vectors.push(acc);
    }
    Ok(TaylorSourceSet { vectors })
}

fn check_samples_or_single(values: &[StateVector]) -> Result<usize> {
    if values.len() == 1 {
        Ok(values[0].len())
    } else {
        check_samples(values)
    }
}

/// Barycentric Lobatto weights `(-1)^j delta_j`, halved at both ends.
fn lobatto_weights(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j + 1 == m {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect()
}

/// Degree `m-1` interpolant of the node values evaluated at `t`; exact at
/// nodes and usable for mild extrapolation outside the slab.
pub fn barycentric_eval(slab: &TimeSlab, values: &[StateVector], t: f64) -> Result<StateVector> {
    if values.len() != slab.len() {
        return Err(Error::InvalidParameter(format!(
            "slab has {} nodes but {} values were given",
            slab.len(),
            values.len()
        )));
    }
    let dim = check_samples(values)?;
    let tau = t - slab.t_start();
    let offsets = slab.offsets();
    if let Some(j) = (0..slab.len()).find(|&j| slab.node(j) == t || offsets[j] == tau) {
        return Ok(values[j].clone());
    }
    let basis: Vec<f64> = if (0.0..=slab.dt()).contains(&tau) {
        let weights = lobatto_weights(slab.len());
        let q: Vec<f64> = weights
            .iter()
            .zip(offsets)
            .map(|(w, o)| w / (tau - o))
            .collect();
        let denom: f64 = q.iter().sum();
        q.into_iter().map(|x| x / denom).collect()
    } else {
        // the second barycentric form is unstable off the interval
        (0..offsets.len())
            .map(|j| {
                offsets
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, o)| (tau - o) / (offsets[j] - o))
                    .product()
            })
            .collect()
    };
    let mut acc = zeros(dim);
    for (l, v) in basis.iter().zip(values) {
        axpy_real(*l, v, &mut acc);
    }
    Ok(acc)
}
