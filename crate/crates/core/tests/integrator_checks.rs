//! Behavioral checks on the fixed-step integrators: conservation laws,
//! convergence order, determinism and the backward-pass boundary behavior.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seirs_control::{
    integrate_adjoint_backward, integrate_state_forward, ControlVector, Scenario, TimeGrid,
};

fn zero_controls(grid: &TimeGrid) -> Vec<ControlVector> {
    vec![ControlVector::ZERO; grid.n_nodes()]
}

/// Piecewise-random admissible controls, linear between a few knots.
fn random_admissible_controls(grid: &TimeGrid, rng: &mut ChaCha8Rng) -> Vec<ControlVector> {
    let knots = 12usize;
    let knot_values: Vec<ControlVector> = (0..=knots)
        .map(|_| ControlVector::new(rng.random_range(0.0..0.1), rng.random_range(0.0..0.4)))
        .collect();
    (0..grid.n_nodes())
        .map(|i| {
            let pos = i as f64 / grid.n_steps() as f64 * knots as f64;
            let k = (pos.floor() as usize).min(knots - 1);
            let w = pos - k as f64;
            ControlVector::new(
                (1.0 - w) * knot_values[k].treatment + w * knot_values[k + 1].treatment,
                (1.0 - w) * knot_values[k].vaccination + w * knot_values[k + 1].vaccination,
            )
        })
        .collect()
}

#[test]
fn autonomous_equilibrium_conserves_population() {
    // Recruitment 0.05 balances mortality 0.05 at N = 1, so the total stays
    // put no matter what the controls do.
    let scenario = Scenario::table1_default();
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let params = scenario.parameter_set();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut control_sets = vec![zero_controls(&grid)];
    for _ in 0..3 {
        control_sets.push(random_admissible_controls(&grid, &mut rng));
    }
    for controls in control_sets {
        let states = integrate_state_forward(
            &grid,
            scenario.initial,
            &controls,
            &params,
            &scenario.incidence,
        )
        .unwrap();
        for x in &states {
            assert!((x.total() - 1.0).abs() < 1e-10, "N = {}", x.total());
        }
    }
}

#[test]
fn forced_population_matches_variation_of_constants() {
    let mut scenario = Scenario::table1_default();
    scenario.per = 0.8;
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let params = scenario.parameter_set();
    let states = integrate_state_forward(
        &grid,
        scenario.initial,
        &zero_controls(&grid),
        &params,
        &scenario.incidence,
    )
    .unwrap();

    // N' = 0.05 + a·cos(w t) − mu·N with N(0) = 1, solved exactly.
    let mu = 0.05;
    let a = 0.05 * 0.8;
    let w = std::f64::consts::TAU;
    let closed_form = |t: f64| {
        (-mu * t).exp()
            + (1.0 - (-mu * t).exp())
            + a * (mu * (w * t).cos() + w * (w * t).sin() - mu * (-mu * t).exp())
                / (mu * mu + w * w)
    };
    for (i, x) in states.iter().enumerate() {
        let expected = closed_form(grid.node(i));
        assert!(
            (x.total() - expected).abs() < 1e-8,
            "node {i}: N = {} vs {expected}",
            x.total()
        );
    }
}

#[test]
fn rk4_exhibits_fourth_order_convergence() {
    // Smooth uncontrolled forced system; error measured against a
    // sixteen-fold finer reference. Halving the step should shrink the
    // error by roughly 2^4.
    let mut scenario = Scenario::table1_default();
    scenario.per = 0.8;
    let params = scenario.parameter_set();
    let s_end = |steps: usize| {
        let grid = TimeGrid::new(25.0, steps).unwrap();
        integrate_state_forward(
            &grid,
            scenario.initial,
            &zero_controls(&grid),
            &params,
            &scenario.incidence,
        )
        .unwrap()
        .last()
        .unwrap()
        .susceptible
    };
    let error_coarse = (s_end(250) - s_end(250 * 16)).abs();
    let error_fine = (s_end(500) - s_end(500 * 16)).abs();
    let ratio = error_coarse / error_fine;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "error ratio {ratio} (coarse {error_coarse:e}, fine {error_fine:e})"
    );
}

#[test]
fn integration_is_bit_deterministic() {
    let mut scenario = Scenario::table1_default();
    scenario.per = 0.8;
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let params = scenario.parameter_set();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let controls = random_admissible_controls(&grid, &mut rng);

    let run = || {
        integrate_state_forward(
            &grid,
            scenario.initial,
            &controls,
            &params,
            &scenario.incidence,
        )
        .unwrap()
    };
    let first = run();
    let second = run();
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(
            a.as_array().map(f64::to_bits),
            b.as_array().map(f64::to_bits)
        );
    }

    let weights = scenario.weights;
    let back = || {
        integrate_adjoint_backward(
            &grid,
            &first,
            &controls,
            &params,
            &scenario.incidence,
            &weights,
        )
        .unwrap()
    };
    let p1 = back();
    let p2 = back();
    for (a, b) in p1.iter().zip(&p2) {
        assert_eq!(
            a.as_array().map(f64::to_bits),
            b.as_array().map(f64::to_bits)
        );
    }
}

#[test]
fn states_stay_nonnegative_under_admissible_controls() {
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for per in [0.0, 0.8] {
        let mut forced = Scenario::table1_default();
        forced.per = per;
        let params = forced.parameter_set();
        for _ in 0..5 {
            let controls = random_admissible_controls(&grid, &mut rng);
            let states = integrate_state_forward(
                &grid,
                forced.initial,
                &controls,
                &params,
                &forced.incidence,
            )
            .unwrap();
            for x in &states {
                for v in x.as_array() {
                    assert!(v >= -1e-9, "negative component {v}");
                }
            }
        }
    }
}

#[test]
fn population_respects_the_recruitment_mortality_cap() {
    let scenario = Scenario::table1_default();
    let bound = scenario.population_bound().unwrap();
    assert!((bound - 2.0).abs() < 1e-15);
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let params = scenario.parameter_set();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let controls = random_admissible_controls(&grid, &mut rng);
    let states = integrate_state_forward(
        &grid,
        scenario.initial,
        &controls,
        &params,
        &scenario.incidence,
    )
    .unwrap();
    for x in &states {
        assert!(x.total() <= bound + 1e-9);
        for v in x.as_array() {
            assert!(v <= bound + 1e-9);
        }
    }
}

#[test]
fn first_backward_step_integrates_the_running_cost_weight() {
    // At zero costate only p3' = −k1 acts, so one step back from the free
    // terminal time picks up k1·h plus an O(h²) correction.
    let scenario = Scenario::table1_default();
    let grid = TimeGrid::new(25.0, 2500).unwrap();
    let params = scenario.parameter_set();
    let controls = zero_controls(&grid);
    let states = integrate_state_forward(
        &grid,
        scenario.initial,
        &controls,
        &params,
        &scenario.incidence,
    )
    .unwrap();
    let adjoints = integrate_adjoint_backward(
        &grid,
        &states,
        &controls,
        &params,
        &scenario.incidence,
        &scenario.weights,
    )
    .unwrap();
    let h = grid.step();
    let p3_before_end = adjoints[grid.n_steps() - 1].infective;
    assert!(
        (p3_before_end - scenario.weights.infected() * h).abs() < 1e-5,
        "p3(tf − h) = {p3_before_end}"
    );

    // Cross-check against a ten-fold finer reference at the same time point.
    let fine = TimeGrid::new(25.0, 25_000).unwrap();
    let fine_controls = zero_controls(&fine);
    let fine_states = integrate_state_forward(
        &fine,
        scenario.initial,
        &fine_controls,
        &params,
        &scenario.incidence,
    )
    .unwrap();
    let fine_adjoints = integrate_adjoint_backward(
        &fine,
        &fine_states,
        &fine_controls,
        &params,
        &scenario.incidence,
        &scenario.weights,
    )
    .unwrap();
    let reference = fine_adjoints[fine.n_steps() - 10].infective;
    assert!(
        (p3_before_end - reference).abs() < 1e-9,
        "{p3_before_end} vs reference {reference}"
    );
}
