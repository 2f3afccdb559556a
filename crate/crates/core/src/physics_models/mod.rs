//! Fourier pseudospectral test problems.

mod grid;
mod ground_state;
mod models;

pub use grid::{fourier_derivative, FourierGrid};
pub use ground_state::{gpe_ground_state, GroundState, GroundStateConfig};
pub use models::{
    advection_problem, gpe_problem, oscillator_problem, Advection, DerivativeOperator, DrivenOscillator,
    GrossPitaevskii, Hamiltonian, SchrodingerOperator,
};
