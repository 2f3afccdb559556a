//! Single-slab solution of `u' = G u + sum_j tau^j/j! s_j` for a fixed `G`:
//!
//! `u(tau) = sum_{j<m} tau^j/j! v_j + f_m(G, tau) v_m`, with `v_0 = u_0`,
//! `v_j = G v_{j-1} + s_{j-1}`, and `f_m(G, tau) v_m` replaced by a `k`-term
//! Chebyshev expansion over the spectral segment.

use num_complex::Complex64;

use crate::cheb_algebra::{cheb_to_taylor, samples_to_cheb, TaylorSourceSet, TimeSlab};
use crate::linalg::{axpy, axpy_real, check_len, zeros};
use crate::operators::{OperatorHandle, ScaledOperator};
use crate::scalar_kernels::{fm_cheb_coeffs, ChebCoeffSet, FmOrder, SpectralSegment, DEFAULT_OVERSAMPLING};
use crate::{Error, Result, StateVector};

/// `v_0..v_m` with `v_0 = u_0` and `v_j = G v_{j-1} + s_{j-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceVectors {
    vectors: Vec<StateVector>,
}

impl RecurrenceVectors {
    /// `m`, the number of source terms.
    pub fn m(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn last(&self) -> &StateVector {
        self.vectors.last().expect("recurrence has v_0")
    }
}

/// Costs exactly `m` matvecs.
pub fn recurrence_vectors(
    g: &OperatorHandle,
    u0: &[Complex64],
    src: &TaylorSourceSet,
) -> Result<RecurrenceVectors> {
    check_len(u0, g.dim())?;
    if src.is_empty() {
        return Err(Error::InvalidParameter("source set is empty".into()));
    }
    if src.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: src.dim(),
        });
    }
    let mut vectors = Vec::with_capacity(src.len() + 1);
    vectors.push(u0.to_vec());
    for s in src.vectors() {
        let mut next = g.apply(vectors.last().expect("non-empty"))?;
        axpy(Complex64::new(1.0, 0.0), s, &mut next);
        vectors.push(next);
    }
    Ok(RecurrenceVectors { vectors })
}

/// `T_n(X) v` for `n < k` via the three-term recurrence; `k - 1` matvecs.
pub fn chebyshev_vectors(
    g: &OperatorHandle,
    segment: SpectralSegment,
    v: &[Complex64],
    k: usize,
) -> Result<Vec<StateVector>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let x = ScaledOperator::new(g, segment)?;
    let mut out = Vec::with_capacity(k);
    out.push(v.to_vec());
    if k > 1 {
        out.push(x.apply(v)?);
    }
    let mut scratch = zeros(v.len());
    for n in 2..k {
        x.apply_into(&out[n - 1], &mut scratch)?;
        let next: StateVector = scratch
            .iter()
            .zip(&out[n - 2])
            .map(|(a, b)| a * 2.0 - b)
            .collect();
        out.push(next);
    }
    Ok(out)
}

/// Precomputed scalar data for evaluating a slab solution at fixed offsets.
#[derive(Debug, Clone)]
pub struct SlabEvaluator {
    segment: SpectralSegment,
    m: FmOrder,
    k: usize,
    taus: Vec<f64>,
    expansions: Vec<ChebCoeffSet>,
}

impl SlabEvaluator {
    /// Builds `f_m` expansions for every offset. The tail check (when
    /// requested) runs at the largest offset only.
    pub fn new(
        segment: SpectralSegment,
        m: usize,
        k: usize,
        taus: &[f64],
        oversampling: usize,
        tail_tol: Option<f64>,
    ) -> Result<Self> {
        let order = FmOrder::try_from(m)?;
        if let Some(t) = taus.iter().find(|t| !(**t >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "evaluation offsets must be >= 0, got {t}"
            )));
        }
        let worst = taus.iter().cloned().fold(0.0, f64::max);
        let expansions = taus
            .iter()
            .map(|&tau| {
                let tol = if tau == worst { tail_tol } else { None };
                fm_cheb_coeffs(segment, tau, order, k, oversampling, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            segment,
            m: order,
            k,
            taus: taus.to_vec(),
            expansions,
        })
    }

    pub fn segment(&self) -> SpectralSegment {
        self.segment
    }

    pub fn m(&self) -> usize {
        self.m.as_usize()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn expansion(&self, idx: usize) -> &ChebCoeffSet {
        &self.expansions[idx]
    }

    /// Solution at offset `taus[idx]` from the recurrence and Chebyshev
    /// vectors. No matvecs.
    pub fn eval(&self, idx: usize, rec: &RecurrenceVectors, cheb: &[StateVector]) -> StateVector {
        let tau = self.taus[idx];
        let v = rec.vectors();
        let mut out = zeros(v[0].len());
        let mut w = 1.0;
        for (j, vj) in v[..self.m()].iter().enumerate() {
            if j > 0 {
                w *= tau / j as f64;
            }
            axpy_real(w, vj, &mut out);
        }
        for (c, t) in self.expansions[idx].coefficients.iter().zip(cheb) {
            axpy(*c, t, &mut out);
        }
        out
    }

    /// Chebyshev vectors for `rec` then every offset; `k - 1` matvecs.
    pub fn evaluate(&self, g: &OperatorHandle, rec: &RecurrenceVectors) -> Result<Vec<StateVector>> {
        if rec.m() != self.m() {
            return Err(Error::InvalidParameter(format!(
                "recurrence has m = {}, evaluator expects {}",
                rec.m(),
                self.m()
            )));
        }
        let cheb = chebyshev_vectors(g, self.segment, rec.last(), self.k)?;
        Ok((0..self.taus.len()).map(|i| self.eval(i, rec, &cheb)).collect())
    }
}

/// `u(tau)` for every requested local offset; `k - 1` matvecs in total.
pub fn evaluate_solution(
    g: &OperatorHandle,
    rec: &RecurrenceVectors,
    segment: SpectralSegment,
    taus: &[f64],
    k: usize,
    tail_tol: Option<f64>,
) -> Result<Vec<StateVector>> {
    SlabEvaluator::new(segment, rec.m(), k, taus, DEFAULT_OVERSAMPLING, tail_tol)?.evaluate(g, rec)
}

/// Outcome of [`solve_const_g`].
#[derive(Debug, Clone, PartialEq)]
pub struct OneShot {
    pub state: StateVector,
    pub matvecs: u64,
}

/// Solves `u' = G u + s(t)`, `u(0) = u0` on `[0, t_final]` with a single slab.
pub fn solve_const_g(
    g: &OperatorHandle,
    segment: SpectralSegment,
    u0: &[Complex64],
    source: impl Fn(f64) -> StateVector,
    t_final: f64,
    m: usize,
    k: usize,
    tail_tol: Option<f64>,
) -> Result<OneShot> {
    let start = g.matvecs();
    let slab = TimeSlab::new(0.0, t_final, m)?;
    let samples: Vec<StateVector> = slab.nodes().into_iter().map(&source).collect();
    for s in &samples {
        check_len(s, g.dim())?;
    }
    let src = cheb_to_taylor(&samples_to_cheb(&samples)?, t_final)?;
    let rec = recurrence_vectors(g, u0, &src)?;
    let state = evaluate_solution(g, &rec, segment, &[t_final], k, tail_tol)?
        .pop()
        .expect("one output");
    Ok(OneShot {
        state,
        matvecs: g.matvecs() - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{dense_operator, DenseMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, |i, j| c(((i * 7 + j * 3) % 5) as f64 * 0.1 - 0.2, ((i + 2 * j) % 3) as f64 * 0.05))
    }

    #[test]
    fn zero_generator_copies_sources() {
        let g = dense_operator(DenseMatrix::from_fn(2, |_, _| c(0.0, 0.0)));
        let src = TaylorSourceSet::new(vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 1.0), c(0.0, 3.0)]]).unwrap();
        let rec = recurrence_vectors(&g, &[c(5.0, 0.0), c(6.0, 0.0)], &src).unwrap();
        assert_eq!(rec.vectors()[1], src.vectors()[0]);
        assert_eq!(rec.vectors()[2], src.vectors()[1]);
        assert_eq!(g.matvecs(), 2);
    }

    #[test]
    fn zero_source_gives_powers() {
        let m = test_matrix(5);
        let g = dense_operator(m.clone());
        let oracle = dense_operator(m);
        let u0: Vec<_> = (0..5).map(|i| c(i as f64, 1.0)).collect();
        let rec = recurrence_vectors(&g, &u0, &TaylorSourceSet::zero(3, 5)).unwrap();
        let mut p = u0.clone();
        for j in 1..=3 {
            p = oracle.apply(&p).unwrap();
            for (a, b) in rec.vectors()[j].iter().zip(&p) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn recurrence_matches_explicit_loop() {
        let m = test_matrix(5);
        let g = dense_operator(m.clone());
        let u0: Vec<_> = (0..5).map(|i| c(1.0 - i as f64 * 0.3, 0.2)).collect();
        let src = TaylorSourceSet::new(
            (0..3).map(|j| (0..5).map(|i| c((i + j) as f64 * 0.1, -(j as f64))).collect()).collect(),
        )
        .unwrap();
        let rec = recurrence_vectors(&g, &u0, &src).unwrap();
        let mut v = u0.clone();
        for j in 0..3 {
            let mut next = vec![c(0.0, 0.0); 5];
            for r in 0..5 {
                for col in 0..5 {
                    next[r] += m.get(r, col) * v[col];
                }
                next[r] += src.vectors()[j][r];
            }
            for (a, b) in rec.vectors()[j + 1].iter().zip(&next) {
                assert!((a - b).norm() < 1e-14);
            }
            v = next;
        }
        assert!(recurrence_vectors(&g, &u0[..3], &src).is_err());
    }

    #[test]
    fn zero_offset_returns_initial_state() {
        let g = dense_operator(DenseMatrix::diagonal(&[c(0.0, -1.0), c(0.0, 2.0), c(0.0, 0.5)]));
        let seg = SpectralSegment::new(-3.0, 3.0).unwrap();
        let u0 = vec![c(1.0, 0.5), c(-0.5, 0.0), c(0.0, 2.0)];
        let src = TaylorSourceSet::new(vec![vec![c(1.0, 0.0); 3]; 4]).unwrap();
        let rec = recurrence_vectors(&g, &u0, &src).unwrap();
        let out = evaluate_solution(&g, &rec, seg, &[0.0], 6, None).unwrap();
        assert_eq!(out[0], u0);
    }

    #[test]
    fn evaluation_cost_is_independent_of_output_count() {
        let g = dense_operator(DenseMatrix::diagonal(&[c(0.0, -1.0), c(0.0, 2.0)]));
        let seg = SpectralSegment::new(-3.0, 3.0).unwrap();
        let rec = recurrence_vectors(&g, &[c(1.0, 0.0), c(0.0, 1.0)], &TaylorSourceSet::zero(4, 2)).unwrap();
        for count in [1, 3, 9] {
            let before = g.matvecs();
            let taus: Vec<f64> = (0..count).map(|i| 0.1 * i as f64).collect();
            evaluate_solution(&g, &rec, seg, &taus, 12, None).unwrap();
            assert_eq!(g.matvecs() - before, 11);
        }
    }

    #[test]
    fn diagonal_one_shot_matches_closed_form() {
        let energies = [0.3, -1.2, 2.5, 0.0];
        let diag: Vec<_> = energies.iter().map(|e| c(0.0, -e)).collect();
        let g = dense_operator(DenseMatrix::diagonal(&diag));
        let seg = SpectralSegment::new(-2.6, 1.3).unwrap();
        let u0 = vec![c(1.0, 0.0), c(0.5, -0.5), c(0.0, 1.0), c(2.0, 0.0)];
        let t = 1.5;
        let out = solve_const_g(&g, seg, &u0, |_| vec![c(0.0, 0.0); 4], t, 4, 30, Some(1e-11)).unwrap();
        for ((u, e), x0) in out.state.iter().zip(energies).zip(&u0) {
            let want = x0 * c(0.0, -e * t).exp();
            assert!((u - want).norm() < 1e-10);
        }
        assert_eq!(out.matvecs, 4 + 29);
    }
}
