//! Optimal treatment and vaccination schedules for a seasonally forced SEIRS
//! epidemic model.
//!
//! The model tracks susceptible, exposed, infective and recovered population
//! fractions under time-periodic recruitment and transmission, with two
//! bounded controls: treatment of infectives and vaccination of
//! susceptibles. The objective integrates the infected count plus quadratic
//! control effort. Optimal schedules satisfy a two-point boundary value
//! problem — state forward, costate backward, controls given by pointwise
//! clamp formulas — which [`sweep::sweep`] solves by the forward-backward
//! sweep iteration on a shared fixed RK4 grid.
//!
//! Typical use: build a [`scenario::Scenario`] (defaults, TOML, or a
//! [`scenario::SweepSpec`] expansion), pick a [`sweep::SweepConfig`], and
//! inspect the returned [`sweep::Solution`].

pub mod error;
pub mod incidence;
pub mod integrate;
pub mod model;
pub mod params;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
pub use incidence::Incidence;
pub use integrate::{
    integrate_adjoint_backward, integrate_state_forward, quadrature_cost, TimeGrid, Trajectory,
};
pub use model::{
    adjoint_rhs, control_update, hamiltonian, state_rhs, AdjointVector, ControlBounds,
    ControlVector, CostWeights, StateVector,
};
pub use params::{Coefficient, ParameterSet};
pub use scenario::{expand_sweep, Scenario, SweepParameter, SweepSpec};
pub use sweep::{convergence_metric, solve_uncontrolled, sweep, sweep_from, Solution, SweepConfig};
