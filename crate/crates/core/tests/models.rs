mod common;

use common::*;
use nalgebra::DMatrix;
use semiglobal::linalg::rel_l2_error;
use semiglobal::operators::LinearOperator;
use semiglobal::physics_models::*;
use semiglobal::reference::{rk45_problem, rk4_problem, Rk45Config};
use semiglobal::semiglobal::EvolutionProblem;
use semiglobal::Complex64;

/// `G = i A` with `A` Hermitian; returns the spectrum of `A`.
fn imaginary_spectrum(op: &dyn LinearOperator) -> Vec<f64> {
    let g = dense_of(op);
    let a = &g * Complex64::new(0.0, -1.0);
    let herm = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    assert!((&a - &herm).norm() < 1e-10 * a.norm(), "generator is not skew-Hermitian");
    hermitian_eigenvalues(&herm)
}

fn assert_enclosed<P: EvolutionProblem>(p: &P, t: f64, u: &[Complex64]) {
    let seg = p.spectral_segment();
    for lam in imaginary_spectrum(p.generator(t, u).as_ref()) {
        assert!(seg.contains(lam), "eigenvalue {lam} outside [{}, {}]", seg.a(), seg.b());
    }
}

#[test]
fn advection_segment_encloses_spectrum() {
    let p = Advection::new(32).unwrap();
    assert!((p.spectral_segment().b() - 16.8).abs() < 1e-12);
    assert!((p.spectral_segment().a() + 16.8).abs() < 1e-12);
    assert_enclosed(&p, 0.0, &p.initial_state());
}

#[test]
fn oscillator_segment_encloses_spectrum() {
    let p = DrivenOscillator::new(32, 10.0, 15.0).unwrap();
    let u = p.initial_state();
    for t in [0.0, 3.0, 7.5, 11.2, 15.0] {
        assert_enclosed(&p, t, &u);
    }
    let full = DrivenOscillator::standard().unwrap();
    let k_max = std::f64::consts::PI * 128.0 / 20.0;
    let want_a = -(0.5 * k_max * k_max + 60.0) * 1.05;
    assert!((full.spectral_segment().a() - want_a).abs() < 1e-9);
    assert!((full.spectral_segment().b() - 0.525).abs() < 1e-12);
}

#[test]
fn gpe_segment_encloses_spectrum() {
    let p = GrossPitaevskii::new(32, 8.0 * std::f64::consts::PI.sqrt(), 1.0, 8.0, &GroundStateConfig::default()).unwrap();
    let psi = p.initial_state();
    assert_enclosed(&p, 0.0, &psi);
    let doubled: Vec<Complex64> = psi.iter().map(|x| x * 1.02).collect();
    assert_enclosed(&p, 0.0, &doubled);
}

/// Self-consistent lowest eigenvector by dense diagonalization with density
/// mixing.
fn scf_ground_state(grid: &FourierGrid, coupling: f64) -> (Vec<f64>, f64) {
    let n = grid.n();
    let dx = grid.dx();
    let trap: Vec<f64> = grid.points().iter().map(|r| 0.5 * r * r).collect();
    let mut density = vec![0.0; n];
    let mut mu = 0.0;
    let mut v = vec![0.0; n];
    for _ in 0..500 {
        let potential: Vec<f64> = trap.iter().zip(&density).map(|(t, d)| t + coupling * d).collect();
        let h = Hamiltonian::new(std::sync::Arc::new(grid.clone()), potential.clone()).unwrap();
        let dense = dense_of(&h);
        let herm: DMatrix<Complex64> = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let (idx, e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        mu = *e;
        let col = eig.eigenvectors.column(idx);
        let scale = (col.iter().map(|x| x.norm_sqr()).sum::<f64>() * dx).sqrt();
        v = col.iter().map(|x| x.norm() / scale).collect();
        let new: Vec<f64> = v.iter().map(|x| x * x).collect();
        let change = new.iter().zip(&density).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        density = density.iter().zip(&new).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        if change < 1e-13 {
            break;
        }
    }
    (v, mu)
}

#[test]
fn ground_state_agrees_with_dense_scf() {
    let grid = FourierGrid::symmetric(64, 8.0 * std::f64::consts::PI.sqrt()).unwrap();
    let gs = gpe_ground_state(&grid, 1.0, &GroundStateConfig::default()).unwrap();
    let (v, mu) = scf_ground_state(&grid, 1.0);
    assert!((gs.mu - mu).abs() < 1e-9, "{} vs {mu}", gs.mu);
    let err = gs.state.iter().zip(&v).map(|(a, b)| (a.re - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
}

#[test]
fn advection_rk45_cost_band() {
    let p = Advection::new(32).unwrap();
    let u0 = p.initial_state();
    let exact = p.exact(5.0);
    let run = rk45_problem(&p, &u0, 5.0, &Rk45Config::with_tol(3e-6)).unwrap();
    let err = rel_l2_error(&run.state, &exact);
    assert!(err > 3e-6 && err < 3e-5, "{err}");
    assert!((430..=1720).contains(&run.matvecs), "{}", run.matvecs);
    let stats = run.rk45.unwrap();
    assert_eq!(run.matvecs as usize, stats.rhs_evals);

    let e1 = rel_l2_error(&rk45_problem(&p, &u0, 5.0, &Rk45Config::with_tol(1e-6)).unwrap().state, &exact);
    let e2 = rel_l2_error(&rk45_problem(&p, &u0, 5.0, &Rk45Config::with_tol(1e-7)).unwrap().state, &exact);
    let ratio = e1 / e2;
    assert!(ratio > 10.0 / 3.0 && ratio < 30.0, "{ratio}");
}

#[test]
fn advection_rk4_order() {
    let p = Advection::new(32).unwrap();
    let u0 = p.initial_state();
    let exact = p.exact(5.0);
    let errs: Vec<f64> = [100, 200, 400, 800]
        .iter()
        .map(|&s| {
            let run = rk4_problem(&p, &u0, 5.0, s).unwrap();
            assert_eq!(run.matvecs, 4 * s as u64);
            rel_l2_error(&run.state, &exact)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
    }
}

#[test]
fn rk4_with_zero_rhs_keeps_state() {
    let zero = |_: f64, u: &[Complex64]| Ok(vec![Complex64::new(0.0, 0.0); u.len()]);
    let u0 = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)];
    let out = semiglobal::reference::rk4_propagate(zero, &u0, 3.0, 17).unwrap();
    assert_eq!(out, u0);
}

#[test]
fn rk45_scalar_decay() {
    let decay = |_: f64, u: &[Complex64]| Ok(u.iter().map(|x| -x).collect());
    let (u, _) = semiglobal::reference::rk45_propagate(decay, &[Complex64::new(1.0, 0.0)], 4.0, &Rk45Config::with_tol(1e-9)).unwrap();
    assert!((u[0].re - (-4.0f64).exp()).abs() < 1e-8);
}
