//! Fixed-step fourth-order Runge–Kutta integration on a shared uniform grid.
//!
//! The state system runs forward from the initial condition; the costate
//! system runs backward from its zero terminal condition by integrating the
//! time-reversed equations forward. Both passes use the same grid, and
//! grid-sampled signals (controls, and frozen states in the backward pass)
//! are linearly interpolated at the half-step stage points.

use std::ops::Neg;

use crate::error::{Error, Result};
use crate::incidence::Incidence;
use crate::model::{
    adjoint_rhs, state_rhs, AdjointVector, ControlVector, CostWeights, StateVector,
};
use crate::params::ParameterSet;

/// Uniform grid on `[0, t_end]` with `n_steps + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::invalid("tf", t_end, "tf > 0"));
        }
        if n_steps < 2 {
            return Err(Error::invalid("steps", n_steps as f64, "steps >= 2"));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Node `i`, exact at both endpoints.
    pub fn node(&self, i: usize) -> f64 {
        self.t_end * (i as f64 / self.n_steps as f64)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| self.node(i))
    }
}

/// Grid-sampled state, costate and control values of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector>,
    pub adjoints: Vec<AdjointVector>,
    pub controls: Vec<ControlVector>,
}

impl Trajectory {
    /// Every stored array must have exactly one entry per node.
    pub fn validate(&self) -> Result<()> {
        let expected = self.grid.n_nodes();
        for found in [self.states.len(), self.adjoints.len(), self.controls.len()] {
            if found != expected {
                return Err(Error::LengthMismatch { expected, found });
            }
        }
        Ok(())
    }
}

fn check_len<T>(grid: &TimeGrid, values: &[T]) -> Result<()> {
    if values.len() != grid.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: grid.n_nodes(),
            found: values.len(),
        });
    }
    Ok(())
}

/// Classic RK4 for the state system, forward from `x0`.
///
/// Controls at the half-step stage points are linear interpolants of the
/// adjacent node values. The first output entry is `x0` itself.
pub fn integrate_state_forward(
    grid: &TimeGrid,
    x0: StateVector,
    controls: &[ControlVector],
    params: &ParameterSet,
    incidence: &Incidence,
) -> Result<Vec<StateVector>> {
    check_len(grid, controls)?;
    if !x0.is_finite() {
        return Err(Error::NonFinite {
            operation: "integrate_state_forward",
            what: "initial state",
        });
    }
    if controls.iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinite {
            operation: "integrate_state_forward",
            what: "control array",
        });
    }

    let h = grid.step();
    let mut out = Vec::with_capacity(grid.n_nodes());
    out.push(x0);
    for i in 0..grid.n_steps() {
        let t0 = grid.node(i);
        let t1 = grid.node(i + 1);
        let tm = 0.5 * (t0 + t1);
        let um = ControlVector::midpoint(&controls[i], &controls[i + 1]);
        let y = out[i];

        let diverged = |_| Error::Diverged { step: i, t: t1 };
        let k1 = state_rhs(t0, &y, &controls[i], params, incidence).map_err(diverged)?;
        let k2 = state_rhs(tm, &(y + k1 * (0.5 * h)), &um, params, incidence).map_err(diverged)?;
        let k3 = state_rhs(tm, &(y + k2 * (0.5 * h)), &um, params, incidence).map_err(diverged)?;
        let k4 =
            state_rhs(t1, &(y + k3 * h), &controls[i + 1], params, incidence).map_err(diverged)?;

        let next = y + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        if !next.is_finite() {
            return Err(Error::Diverged { step: i, t: t1 });
        }
        out.push(next);
    }
    Ok(out)
}

/// RK4 for the costate system, backward from the zero terminal condition.
///
/// The substitution `t' = t_end − t` turns the backward problem into a
/// forward one: the right-hand side is negated and the frozen state/control
/// signals are read in reverse, with linear interpolation at half steps.
/// The returned array is indexed by the original nodes; its last entry is
/// exactly zero.
pub fn integrate_adjoint_backward(
    grid: &TimeGrid,
    states: &[StateVector],
    controls: &[ControlVector],
    params: &ParameterSet,
    incidence: &Incidence,
    weights: &CostWeights,
) -> Result<Vec<AdjointVector>> {
    check_len(grid, states)?;
    check_len(grid, controls)?;
    if states.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            operation: "integrate_adjoint_backward",
            what: "state array",
        });
    }
    if controls.iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinite {
            operation: "integrate_adjoint_backward",
            what: "control array",
        });
    }

    let h = grid.step();
    let mut out = vec![AdjointVector::ZERO; grid.n_nodes()];
    for m in (1..=grid.n_steps()).rev() {
        let t_hi = grid.node(m);
        let t_lo = grid.node(m - 1);
        let tm = 0.5 * (t_hi + t_lo);
        let xm = (states[m - 1] + states[m]) * 0.5;
        let um = ControlVector::midpoint(&controls[m - 1], &controls[m]);
        let q = out[m];

        let diverged = |_| Error::Diverged {
            step: m - 1,
            t: t_lo,
        };
        let k1 = adjoint_rhs(
            t_hi,
            &q,
            &states[m],
            &controls[m],
            params,
            incidence,
            weights,
        )
        .map_err(diverged)?
        .neg();
        let k2 = adjoint_rhs(
            tm,
            &(q + k1 * (0.5 * h)),
            &xm,
            &um,
            params,
            incidence,
            weights,
        )
        .map_err(diverged)?
        .neg();
        let k3 = adjoint_rhs(
            tm,
            &(q + k2 * (0.5 * h)),
            &xm,
            &um,
            params,
            incidence,
            weights,
        )
        .map_err(diverged)?
        .neg();
        let k4 = adjoint_rhs(
            t_lo,
            &(q + k3 * h),
            &states[m - 1],
            &controls[m - 1],
            params,
            incidence,
            weights,
        )
        .map_err(diverged)?
        .neg();

        let prev = q + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        if !prev.is_finite() {
            return Err(Error::Diverged {
                step: m - 1,
                t: t_lo,
            });
        }
        out[m - 1] = prev;
    }
    Ok(out)
}

/// Composite trapezoid rule over the running cost
/// `k1·I + k2·T² + k3·V²`.
pub fn quadrature_cost(
    grid: &TimeGrid,
    states: &[StateVector],
    controls: &[ControlVector],
    weights: &CostWeights,
) -> f64 {
    assert_eq!(states.len(), grid.n_nodes(), "states array must match grid");
    assert_eq!(
        controls.len(),
        grid.n_nodes(),
        "controls array must match grid"
    );
    let running = |i: usize| {
        weights.infected() * states[i].infective
            + weights.treatment() * controls[i].treatment * controls[i].treatment
            + weights.vaccination() * controls[i].vaccination * controls[i].vaccination
    };
    let n = grid.n_steps();
    let sum: f64 = (0..=n).map(running).sum::<f64>() - 0.5 * (running(0) + running(n));
    grid.step() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Coefficient;

    fn constant_params(values: [f64; 6]) -> ParameterSet {
        ParameterSet {
            recruitment: Coefficient::Constant(values[0]),
            transmission: Coefficient::Constant(values[1]),
            natural_death: Coefficient::Constant(values[2]),
            immunity_loss: Coefficient::Constant(values[3]),
            infectivity: Coefficient::Constant(values[4]),
            recovery: Coefficient::Constant(values[5]),
        }
    }

    #[test]
    fn grid_nodes_are_uniform_and_exact_at_ends() {
        let grid = TimeGrid::new(25.0, 2500).unwrap();
        assert_eq!(grid.node(0), 0.0);
        assert_eq!(grid.node(2500), 25.0);
        assert_eq!(grid.n_nodes(), 2501);
        let h = grid.step();
        for i in 0..2500 {
            assert!((grid.node(i + 1) - grid.node(i) - h).abs() < 1e-12);
        }
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert!(TimeGrid::new(25.0, 1).is_err());
    }

    #[test]
    fn zero_dynamics_is_the_identity_flow() {
        let grid = TimeGrid::new(5.0, 50).unwrap();
        let params = constant_params([0.0; 6]);
        let inc = Incidence::mass_action();
        let x0 = StateVector::new(0.3, 0.2, 0.1, 0.05);
        let controls = vec![ControlVector::ZERO; grid.n_nodes()];
        // Transmission 0 kills the incidence term; all other rates are 0.
        let states = integrate_state_forward(&grid, x0, &controls, &params, &inc).unwrap();
        for x in &states {
            assert_eq!(*x, x0);
        }
    }

    #[test]
    fn control_array_must_match_grid() {
        let grid = TimeGrid::new(5.0, 50).unwrap();
        let params = constant_params([0.0; 6]);
        let inc = Incidence::mass_action();
        let result = integrate_state_forward(
            &grid,
            StateVector::ZERO,
            &vec![ControlVector::ZERO; 50],
            &params,
            &inc,
        );
        assert!(matches!(
            result,
            Err(Error::LengthMismatch {
                expected: 51,
                found: 50
            })
        ));
    }

    #[test]
    fn divergence_names_the_step() {
        // Exploding linear growth: recruitment via transmission is zero, but a
        // huge negative mortality doubles the state every step until overflow.
        let grid = TimeGrid::new(10.0, 100).unwrap();
        let params = constant_params([0.0, 0.0, -5000.0, 0.0, 0.0, 0.0]);
        let inc = Incidence::mass_action();
        let controls = vec![ControlVector::ZERO; grid.n_nodes()];
        let result = integrate_state_forward(
            &grid,
            StateVector::new(1.0, 1.0, 1.0, 1.0),
            &controls,
            &params,
            &inc,
        );
        match result {
            Err(Error::Diverged { step, .. }) => assert!(step < 100),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn adjoint_terminal_node_is_exactly_zero() {
        let grid = TimeGrid::new(25.0, 250).unwrap();
        let params = constant_params([0.05, 0.56, 0.05, 0.041, 0.03, 0.05]);
        let inc = Incidence::mass_action();
        let weights = CostWeights::new(1.0, 0.01, 0.01).unwrap();
        let controls = vec![ControlVector::ZERO; grid.n_nodes()];
        let states = integrate_state_forward(
            &grid,
            StateVector::new(0.98, 0.0, 0.01, 0.01),
            &controls,
            &params,
            &inc,
        )
        .unwrap();
        let adjoints =
            integrate_adjoint_backward(&grid, &states, &controls, &params, &inc, &weights).unwrap();
        assert_eq!(*adjoints.last().unwrap(), AdjointVector::ZERO);
        assert!(adjoints.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn adjoint_stays_zero_without_running_cost_or_coupling() {
        let grid = TimeGrid::new(25.0, 250).unwrap();
        // k1 = 0 and transmission = 0: zero is a fixed point of the
        // linear costate system.
        let params = constant_params([0.05, 0.0, 0.05, 0.041, 0.03, 0.05]);
        let inc = Incidence::mass_action();
        let weights = CostWeights::new(0.0, 0.01, 0.01).unwrap();
        let controls = vec![ControlVector::ZERO; grid.n_nodes()];
        let states = integrate_state_forward(
            &grid,
            StateVector::new(0.98, 0.0, 0.01, 0.01),
            &controls,
            &params,
            &inc,
        )
        .unwrap();
        let adjoints =
            integrate_adjoint_backward(&grid, &states, &controls, &params, &inc, &weights).unwrap();
        for p in &adjoints {
            assert_eq!(*p, AdjointVector::ZERO);
        }
    }

    #[test]
    fn quadrature_is_exact_for_constant_and_linear_integrands() {
        let weights = CostWeights::new(1.0, 0.01, 0.01).unwrap();

        let grid = TimeGrid::new(25.0, 2500).unwrap();
        let ones = vec![StateVector::new(0.0, 0.0, 1.0, 0.0); grid.n_nodes()];
        let zeros = vec![ControlVector::ZERO; grid.n_nodes()];
        let j = quadrature_cost(&grid, &ones, &zeros, &weights);
        assert!((j - 25.0).abs() < 1e-12);

        let grid = TimeGrid::new(1.0, 100).unwrap();
        let ramp: Vec<StateVector> = grid
            .times()
            .map(|t| StateVector::new(0.0, 0.0, t, 0.0))
            .collect();
        let zeros = vec![ControlVector::ZERO; grid.n_nodes()];
        let j = quadrature_cost(&grid, &ramp, &zeros, &weights);
        assert!((j - 0.5).abs() < 1e-14);
    }

    #[test]
    fn quadrature_includes_control_effort() {
        let weights = CostWeights::new(0.0, 2.0, 3.0).unwrap();
        let grid = TimeGrid::new(2.0, 10).unwrap();
        let states = vec![StateVector::ZERO; grid.n_nodes()];
        let controls = vec![ControlVector::new(0.5, 0.25); grid.n_nodes()];
        let j = quadrature_cost(&grid, &states, &controls, &weights);
        // (2·0.25 + 3·0.0625) · 2
        assert!((j - 1.375).abs() < 1e-14);
    }
}
