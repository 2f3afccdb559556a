#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use semiglobal::operators::DenseMatrix;
use semiglobal::{Complex64, StateVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_c<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    (0..n).map(|_| random_c(rng)).collect()
}

/// Random Hermitian matrix with entries of unit scale.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| random_c(rng));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn to_dense(m: &DMatrix<Complex64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = h.clone().symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// `G = -i H` has spectrum `i [-e_max, -e_min]`; pads the half-width by 5%.
pub fn enclosing_segment(eigenvalues: &[f64]) -> semiglobal::scalar_kernels::SpectralSegment {
    let (lo, hi) = (-eigenvalues[eigenvalues.len() - 1], -eigenvalues[0]);
    let pad = 0.05 * 0.5 * (hi - lo) + 1e-3;
    semiglobal::scalar_kernels::SpectralSegment::new(lo - pad, hi + pad).unwrap()
}

/// Dense matrix of a linear operator, column by column.
pub fn dense_of(op: &dyn semiglobal::operators::LinearOperator) -> DMatrix<Complex64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![c(0.0, 0.0); n];
    let mut col = vec![c(0.0, 0.0); n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = c(0.0, 0.0));
        e[j] = c(1.0, 0.0);
        op.apply_to(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

type Dd = num_complex::Complex<twofloat::TwoFloat>;

fn dd(x: Complex64) -> Dd {
    Dd::new(x.re.into(), x.im.into())
}

fn dd_norm(v: &[Dd]) -> f64 {
    v.iter().map(|x| x.re.hi() * x.re.hi() + x.im.hi() * x.im.hi()).sum::<f64>().sqrt()
}

// `TwoFloat::powi` gives NaN for 0^0
fn dd_pow(x: twofloat::TwoFloat, n: usize) -> twofloat::TwoFloat {
    (0..n).fold(twofloat::TwoFloat::from(1.0), |acc, _| acc * x)
}

/// `u' = G u + sum_d a_d t^d` integrated in double-double arithmetic by an
/// adaptive Taylor series method: steps keep `||G||_F h <= 1/4` and each series
/// runs until its terms fall below `1e-32` of the partial sum.
pub fn taylor_oracle(g: &DMatrix<Complex64>, poly: &[StateVector], u0: &[Complex64], t_final: f64) -> StateVector {
    use twofloat::TwoFloat;
    let n = u0.len();
    let gd: Vec<Vec<Dd>> = (0..n).map(|i| (0..n).map(|j| dd(g[(i, j)])).collect()).collect();
    let pd: Vec<Vec<Dd>> = poly.iter().map(|a| a.iter().map(|&x| dd(x)).collect()).collect();
    let norm_g = g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
    let steps = ((t_final * norm_g / 0.25).ceil() as usize).max(1);
    let h = TwoFloat::from(t_final) / steps as f64;
    let zero = Dd::new(TwoFloat::from(0.0), TwoFloat::from(0.0));
    let mut u: Vec<Dd> = u0.iter().map(|&x| dd(x)).collect();
    for s in 0..steps {
        let t0 = h * s as f64;
        // p^{(j)}(t0) / j!
        let taylor_p: Vec<Vec<Dd>> = (0..pd.len())
            .map(|j| {
                let mut acc = vec![zero; n];
                for (d, a) in pd.iter().enumerate().skip(j) {
                    let w = dd_pow(t0, d - j) * binomial(d, j);
                    for (x, y) in acc.iter_mut().zip(a) {
                        *x = *x + *y * w;
                    }
                }
                acc
            })
            .collect();
        // w_j = h^j u^{(j)}(t0) / j!, w_{j+1} = h (G w_j + h^j p_j) / (j+1)
        let mut w = u.clone();
        let mut sum = u.clone();
        let mut small = 0;
        for j in 0..400 {
            let mut next: Vec<Dd> = gd
                .iter()
                .map(|row| row.iter().zip(&w).fold(zero, |acc, (a, b)| acc + *a * *b))
                .collect();
            if let Some(p) = taylor_p.get(j) {
                let hj = dd_pow(h, j);
                for (x, y) in next.iter_mut().zip(p) {
                    *x = *x + *y * hj;
                }
            }
            let scale = h / (j as f64 + 1.0);
            next.iter_mut().for_each(|x| *x = *x * scale);
            for (x, y) in sum.iter_mut().zip(&next) {
                *x = *x + *y;
            }
            let (tn, sn) = (dd_norm(&next), dd_norm(&sum));
            w = next;
            if j + 1 >= pd.len() && tn <= 1e-32 * sn {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        u = sum;
    }
    u.iter().map(|x| Complex64::new(x.re.hi() + x.re.lo(), x.im.hi() + x.im.lo())).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `exp(G t) u0` for Hermitian `H` with `G = -i H`, via eigendecomposition.
pub fn unitary_oracle(h: &DMatrix<Complex64>, u0: &[Complex64], t: f64) -> StateVector {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let n = u0.len();
    let mut out = vec![c(0.0, 0.0); n];
    for k in 0..n {
        let coef: Complex64 = (0..n).map(|i| v[(i, k)].conj() * u0[i]).sum();
        let ph = c(0.0, -eig.eigenvalues[k] * t).exp() * coef;
        for i in 0..n {
            out[i] += v[(i, k)] * ph;
        }
    }
    out
}

pub fn poly_eval(poly: &[StateVector], t: f64) -> StateVector {
    let mut acc = vec![c(0.0, 0.0); poly[0].len()];
    for a in poly.iter().rev() {
        for (x, y) in acc.iter_mut().zip(a) {
            *x = *x * t + y;
        }
    }
    acc
}
