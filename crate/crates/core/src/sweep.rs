//! Forward-backward sweep: the fixed-point iteration coupling the state
//! solve, the costate solve and the control characterization.
//!
//! Each pass integrates the state forward under the current controls,
//! integrates the costate backward along that trajectory, and re-derives the
//! controls from the clamp formulas, optionally blended with the previous
//! controls. Iteration stops when the relative change of all ten tracked
//! signals (four state, four costate, two control) drops below the
//! tolerance. Failure to converge is reported, not raised.

use crate::error::{Error, Result};
use crate::integrate::{
    integrate_adjoint_backward, integrate_state_forward, quadrature_cost, TimeGrid, Trajectory,
};
use crate::model::{control_update, AdjointVector, ControlVector, StateVector};
use crate::scenario::Scenario;

/// Iteration settings for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub grid: TimeGrid,
    /// Relative tolerance on every tracked signal.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Blend factor for the control update: `u ← (1−θ)·u_new + θ·u_old`.
    /// Zero replaces the controls outright; values toward one damp
    /// oscillating iterations.
    pub damping: f64,
    /// Floor of the relative-error denominator, for near-zero signals.
    pub residual_floor: f64,
}

pub const DEFAULT_STEPS: usize = 2500;
pub const DEFAULT_TOLERANCE: f64 = 0.01;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

impl SweepConfig {
    pub fn new(grid: TimeGrid) -> Self {
        SweepConfig {
            grid,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            damping: 0.0,
            residual_floor: 1e-12,
        }
    }

    /// Default grid (`DEFAULT_STEPS` steps) over the scenario horizon.
    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        Ok(Self::new(TimeGrid::new(scenario.t_end, DEFAULT_STEPS)?))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 || self.tolerance >= 1.0 {
            return Err(Error::invalid(
                "tolerance",
                self.tolerance,
                "0 < tolerance < 1",
            ));
        }
        if self.max_iterations < 1 {
            return Err(Error::invalid(
                "max_iterations",
                self.max_iterations as f64,
                "max_iterations >= 1",
            ));
        }
        if !self.damping.is_finite() || self.damping < 0.0 || self.damping >= 1.0 {
            return Err(Error::invalid("damping", self.damping, "0 <= damping < 1"));
        }
        if !self.residual_floor.is_finite() || self.residual_floor <= 0.0 {
            return Err(Error::invalid(
                "residual_floor",
                self.residual_floor,
                "residual_floor > 0",
            ));
        }
        Ok(())
    }
}

/// Output of one solve: the trajectory, its cost and how it converged.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub cost: f64,
    pub iterations: usize,
    /// Worst per-signal relative change at each iteration after the first.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

/// Relative l1 change `‖new − old‖₁ / max(‖new‖₁, floor)`.
///
/// Panics if the slices differ in length.
pub fn convergence_metric(old: &[f64], new: &[f64], floor: f64) -> f64 {
    assert_eq!(
        old.len(),
        new.len(),
        "compared vectors must match in length"
    );
    let mut change = 0.0;
    let mut scale = 0.0;
    for (o, n) in old.iter().zip(new) {
        change += (n - o).abs();
        scale += n.abs();
    }
    change / scale.max(floor)
}

fn channel_metric<T>(old: &[T], new: &[T], floor: f64, get: impl Fn(&T) -> f64) -> f64 {
    let mut change = 0.0;
    let mut scale = 0.0;
    for (o, n) in old.iter().zip(new) {
        let (o, n) = (get(o), get(n));
        change += (n - o).abs();
        scale += n.abs();
    }
    change / scale.max(floor)
}

struct Iterate {
    states: Vec<StateVector>,
    adjoints: Vec<AdjointVector>,
    controls: Vec<ControlVector>,
}

impl Iterate {
    /// Worst relative change across the ten tracked signals.
    fn residual_against(&self, next: &Iterate, floor: f64) -> f64 {
        let state_channels: [fn(&StateVector) -> f64; 4] = [
            |x| x.susceptible,
            |x| x.exposed,
            |x| x.infective,
            |x| x.recovered,
        ];
        let adjoint_channels: [fn(&AdjointVector) -> f64; 4] = [
            |p| p.susceptible,
            |p| p.exposed,
            |p| p.infective,
            |p| p.recovered,
        ];
        let control_channels: [fn(&ControlVector) -> f64; 2] = [|u| u.treatment, |u| u.vaccination];

        let mut worst = 0.0_f64;
        for get in state_channels {
            worst = worst.max(channel_metric(&self.states, &next.states, floor, get));
        }
        for get in adjoint_channels {
            worst = worst.max(channel_metric(&self.adjoints, &next.adjoints, floor, get));
        }
        for get in control_channels {
            worst = worst.max(channel_metric(&self.controls, &next.controls, floor, get));
        }
        worst
    }
}

/// Runs the sweep from zero initial controls (or from `start`).
///
/// Non-convergence within `max_iterations` yields a `Solution` flagged
/// `converged = false`; only integration failures raise errors.
pub fn sweep(cfg: &SweepConfig, scenario: &Scenario) -> Result<Solution> {
    sweep_from(cfg, scenario, None)
}

/// As [`sweep`], but seeded with an explicit initial control array.
pub fn sweep_from(
    cfg: &SweepConfig,
    scenario: &Scenario,
    start: Option<Vec<ControlVector>>,
) -> Result<Solution> {
    cfg.validate()?;
    scenario.validate()?;
    if cfg.grid.t_end() != scenario.t_end {
        return Err(Error::HorizonMismatch {
            grid: cfg.grid.t_end(),
            scenario: scenario.t_end,
        });
    }
    let n_nodes = cfg.grid.n_nodes();
    let mut controls = match start {
        Some(seed) => {
            if seed.len() != n_nodes {
                return Err(Error::LengthMismatch {
                    expected: n_nodes,
                    found: seed.len(),
                });
            }
            seed.iter().map(|u| scenario.bounds.clamp(*u)).collect()
        }
        None => vec![ControlVector::ZERO; n_nodes],
    };

    let params = scenario.parameter_set();
    let mut previous: Option<Iterate> = None;
    let mut residual_history = Vec::new();

    for iteration in 1..=cfg.max_iterations {
        let states = integrate_state_forward(
            &cfg.grid,
            scenario.initial,
            &controls,
            &params,
            &scenario.incidence,
        )?;
        let adjoints = integrate_adjoint_backward(
            &cfg.grid,
            &states,
            &controls,
            &params,
            &scenario.incidence,
            &scenario.weights,
        )?;
        let new_controls: Vec<ControlVector> = states
            .iter()
            .zip(&adjoints)
            .zip(&controls)
            .map(|((x, p), old)| {
                let fresh = control_update(x, p, &scenario.weights, &scenario.bounds);
                if cfg.damping == 0.0 {
                    fresh
                } else {
                    ControlVector {
                        treatment: (1.0 - cfg.damping) * fresh.treatment
                            + cfg.damping * old.treatment,
                        vaccination: (1.0 - cfg.damping) * fresh.vaccination
                            + cfg.damping * old.vaccination,
                    }
                }
            })
            .collect();

        let current = Iterate {
            states,
            adjoints,
            controls: new_controls,
        };
        if let Some(prev) = &previous {
            let residual = prev.residual_against(&current, cfg.residual_floor);
            residual_history.push(residual);
            if residual < cfg.tolerance {
                return Ok(finish(
                    cfg,
                    scenario,
                    current,
                    iteration,
                    residual_history,
                    true,
                ));
            }
        }
        controls = current.controls.clone();
        previous = Some(current);
    }

    let last = previous.expect("max_iterations >= 1 guarantees one iterate");
    Ok(finish(
        cfg,
        scenario,
        last,
        cfg.max_iterations,
        residual_history,
        false,
    ))
}

fn finish(
    cfg: &SweepConfig,
    scenario: &Scenario,
    iterate: Iterate,
    iterations: usize,
    residual_history: Vec<f64>,
    converged: bool,
) -> Solution {
    let cost = quadrature_cost(
        &cfg.grid,
        &iterate.states,
        &iterate.controls,
        &scenario.weights,
    );
    Solution {
        trajectory: Trajectory {
            grid: cfg.grid,
            states: iterate.states,
            adjoints: iterate.adjoints,
            controls: iterate.controls,
        },
        cost,
        iterations,
        residual_history,
        converged,
    }
}

/// Single forward solve with both controls identically zero.
///
/// The costate arrays are zeroed; the cost reduces to the infected term.
pub fn solve_uncontrolled(cfg: &SweepConfig, scenario: &Scenario) -> Result<Solution> {
    cfg.validate()?;
    scenario.validate()?;
    if cfg.grid.t_end() != scenario.t_end {
        return Err(Error::HorizonMismatch {
            grid: cfg.grid.t_end(),
            scenario: scenario.t_end,
        });
    }
    let params = scenario.parameter_set();
    let controls = vec![ControlVector::ZERO; cfg.grid.n_nodes()];
    let states = integrate_state_forward(
        &cfg.grid,
        scenario.initial,
        &controls,
        &params,
        &scenario.incidence,
    )?;
    let cost = quadrature_cost(&cfg.grid, &states, &controls, &scenario.weights);
    Ok(Solution {
        trajectory: Trajectory {
            grid: cfg.grid,
            states,
            adjoints: vec![AdjointVector::ZERO; cfg.grid.n_nodes()],
            controls,
        },
        cost,
        iterations: 1,
        residual_history: Vec::new(),
        converged: true,
    })
}
