//! The three commands: single solve, controlled/uncontrolled comparison and
//! parameter sweep.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use seirs_control::{
    expand_sweep, solve_uncontrolled, sweep, Scenario, Solution, SweepConfig, SweepSpec, TimeGrid,
};

use crate::output;

/// Exit code for a run whose solver did not converge.
pub const EXIT_NOT_CONVERGED: i32 = 2;

/// Summary of one resolved run.
pub struct RunReport {
    pub fingerprint: String,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// Solver settings shared by all commands.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverOverrides {
    pub steps: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub damping: Option<f64>,
}

impl SolverOverrides {
    fn config(&self, scenario: &Scenario) -> anyhow::Result<SweepConfig> {
        let steps = self.steps.unwrap_or(seirs_control::sweep::DEFAULT_STEPS);
        let mut cfg = SweepConfig::new(TimeGrid::new(scenario.t_end, steps)?);
        if let Some(tolerance) = self.tolerance {
            cfg.tolerance = tolerance;
        }
        if let Some(max_iterations) = self.max_iterations {
            cfg.max_iterations = max_iterations;
        }
        if let Some(damping) = self.damping {
            cfg.damping = damping;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads the scenario (or takes the stock defaults) and applies the
/// amplitude override.
pub fn load_scenario(config: Option<&Path>, per: Option<f64>) -> anyhow::Result<Scenario> {
    let mut scenario = match config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Scenario::from_toml(&text)?
        }
        None => Scenario::table1_default(),
    };
    if let Some(per) = per {
        scenario.per = per;
        scenario.validate()?;
    }
    Ok(scenario)
}

pub fn cmd_solve(
    config: Option<&Path>,
    out: &Path,
    overrides: &SolverOverrides,
    per: Option<f64>,
) -> anyhow::Result<i32> {
    let scenario = load_scenario(config, per)?;
    let cfg = overrides.config(&scenario)?;
    let solution = sweep(&cfg, &scenario)?;
    output::write_trajectory_csv(out, &solution)?;

    let report = RunReport {
        fingerprint: output::fingerprint(&scenario),
        cost: solution.cost,
        iterations: solution.iterations,
        converged: solution.converged,
        outputs: vec![out.to_path_buf()],
    };
    println!("scenario = {}", report.fingerprint);
    println!("J = {}", output::fmt_f64(report.cost));
    println!("iterations = {}", report.iterations);
    println!("converged = {}", report.converged);
    for path in &report.outputs {
        println!("wrote = {}", path.display());
    }
    Ok(report.exit_code())
}

pub fn cmd_compare(
    config: Option<&Path>,
    out: &Path,
    overrides: &SolverOverrides,
    per: Option<f64>,
) -> anyhow::Result<i32> {
    let scenario = load_scenario(config, per)?;
    let cfg = overrides.config(&scenario)?;
    let controlled = sweep(&cfg, &scenario)?;
    let uncontrolled = solve_uncontrolled(&cfg, &scenario)?;
    output::write_compare_csv(out, &controlled, &uncontrolled)?;

    println!("scenario = {}", output::fingerprint(&scenario));
    println!("J_controlled = {}", output::fmt_f64(controlled.cost));
    println!("J_uncontrolled = {}", output::fmt_f64(uncontrolled.cost));
    println!(
        "J_ratio = {}",
        output::fmt_f64(controlled.cost / uncontrolled.cost)
    );
    println!("iterations = {}", controlled.iterations);
    println!("converged = {}", controlled.converged);
    println!("wrote = {}", out.display());
    Ok(if controlled.converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    })
}

struct MemberOutcome {
    value: f64,
    cost: f64,
    iterations: usize,
    converged: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    config: Option<&Path>,
    out_dir: &Path,
    overrides: &SolverOverrides,
    per: Option<f64>,
    param: &str,
    from: f64,
    to: f64,
    step: f64,
) -> anyhow::Result<i32> {
    let base = load_scenario(config, per)?;
    let spec = SweepSpec::new(param.parse()?, from, to, step)?;
    let members = expand_sweep(&spec, &base);
    let cfg = overrides.config(&base)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    // Members are independent; farm them out, one output file per index.
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<anyhow::Result<MemberOutcome>>>> =
        members.iter().map(|_| Mutex::new(None)).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(members.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= members.len() {
                    break;
                }
                let (value, scenario) = &members[index];
                let outcome = run_member(index, *value, scenario, &cfg, out_dir);
                *slots[index].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut rows = Vec::with_capacity(members.len());
    let mut all_converged = true;
    for slot in slots {
        let outcome = slot
            .into_inner()
            .unwrap()
            .expect("every member index was claimed")?;
        all_converged &= outcome.converged;
        println!(
            "{} = {} J = {} iterations = {} converged = {}",
            spec.parameter(),
            output::fmt_f64(outcome.value),
            output::fmt_f64(outcome.cost),
            outcome.iterations,
            outcome.converged
        );
        rows.push((
            outcome.value,
            outcome.cost,
            outcome.iterations,
            outcome.converged,
        ));
    }
    let index_path = out_dir.join("index.csv");
    output::write_index_csv(&index_path, &rows)?;
    println!("scenario = {}", output::fingerprint(&base));
    println!("wrote = {}", out_dir.display());
    Ok(if all_converged { 0 } else { EXIT_NOT_CONVERGED })
}

/// File name of the trajectory CSV for one sweep member.
pub fn member_file_name(index: usize) -> String {
    format!("member_{index:03}.csv")
}

fn run_member(
    index: usize,
    value: f64,
    scenario: &Scenario,
    cfg: &SweepConfig,
    out_dir: &Path,
) -> anyhow::Result<MemberOutcome> {
    let solution: Solution = sweep(cfg, scenario)?;
    output::write_member_csv(&out_dir.join(member_file_name(index)), &solution)?;
    Ok(MemberOutcome {
        value,
        cost: solution.cost,
        iterations: solution.iterations,
        converged: solution.converged,
    })
}
