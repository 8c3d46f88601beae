//! Declarative problem setups and their TOML representation.
//!
//! A scenario bundles the initial state, the four constant rates, the cost
//! weights, the control bounds, the seasonal forcing knobs and the incidence
//! kind. The forcing follows one fixed shape: the transmission coefficient is
//! `beta·(1 − per·cos(2πt + phase))` and recruitment is
//! `Lambda·(1 + per·cos(2πt))`, so `per = 0` recovers the autonomous model.
//!
//! The config document is flat TOML with sections `initial`, `rates`,
//! `weights`, `bounds`, `forcing` and `incidence`. Unknown keys are errors;
//! missing keys fall back to the built-in defaults below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::Incidence;
use crate::model::{ControlBounds, CostWeights, StateVector};
use crate::params::{Coefficient, ParameterSet};

/// One complete problem setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub initial: StateVector,
    /// `mu`: removal from every compartment.
    pub natural_death: f64,
    /// `epsilon`: progression from exposed to infective.
    pub infectivity: f64,
    /// `gamma`: recovery of infectives.
    pub recovery: f64,
    /// `eta`: waning of immunity, recovered back to susceptible.
    pub immunity_loss: f64,
    pub weights: CostWeights,
    pub bounds: ControlBounds,
    /// `tf`: end of the planning horizon.
    pub t_end: f64,
    /// Forcing amplitude in `[0, 1)`; zero means autonomous.
    pub per: f64,
    /// Phase of the transmission modulation.
    pub phase: f64,
    /// `beta`: mean transmission coefficient.
    pub transmission_scale: f64,
    /// `Lambda`: mean recruitment rate.
    pub recruitment_mean: f64,
    pub incidence: Incidence,
}

impl Scenario {
    /// The stock parameterization used throughout the simulation study.
    pub fn table1_default() -> Self {
        Scenario {
            initial: StateVector::new(0.98, 0.0, 0.01, 0.01),
            natural_death: 0.05,
            infectivity: 0.03,
            recovery: 0.05,
            immunity_loss: 0.041,
            weights: CostWeights::new(1.0, 0.01, 0.01).expect("default weights are valid"),
            bounds: ControlBounds::new(0.1, 0.4).expect("default bounds are valid"),
            t_end: 25.0,
            per: 0.0,
            phase: 0.26,
            transmission_scale: 0.56,
            recruitment_mean: 0.05,
            incidence: Incidence::mass_action(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("S0", self.initial.susceptible),
            ("E0", self.initial.exposed),
            ("I0", self.initial.infective),
            ("R0", self.initial.recovered),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::invalid(name, value, "a finite value >= 0"));
            }
        }
        if self.initial.total() <= 0.0 {
            return Err(Error::invalid(
                "S0+E0+I0+R0",
                self.initial.total(),
                "a positive initial population",
            ));
        }
        let rates = [
            ("mu", self.natural_death),
            ("epsilon", self.infectivity),
            ("gamma", self.recovery),
            ("eta", self.immunity_loss),
            ("beta", self.transmission_scale),
            ("Lambda", self.recruitment_mean),
        ];
        for (name, value) in rates {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::invalid(name, value, "a finite value >= 0"));
            }
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::invalid("tf", self.t_end, "tf > 0"));
        }
        if !self.per.is_finite() || self.per < 0.0 || self.per >= 1.0 {
            return Err(Error::invalid("per", self.per, "the bound [0, 1)"));
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("phase", self.phase, "a finite value"));
        }
        self.parameter_set().validate()
    }

    /// The six evaluable coefficients implied by the forcing knobs.
    pub fn parameter_set(&self) -> ParameterSet {
        let (transmission, recruitment) = if self.per == 0.0 {
            (
                Coefficient::Constant(self.transmission_scale),
                Coefficient::Constant(self.recruitment_mean),
            )
        } else {
            (
                Coefficient::Cosine {
                    mean: self.transmission_scale,
                    relative_amplitude: -self.per,
                    angular_frequency: std::f64::consts::TAU,
                    phase: self.phase,
                },
                Coefficient::Cosine {
                    mean: self.recruitment_mean,
                    relative_amplitude: self.per,
                    angular_frequency: std::f64::consts::TAU,
                    phase: 0.0,
                },
            )
        };
        ParameterSet {
            recruitment,
            transmission,
            natural_death: Coefficient::Constant(self.natural_death),
            immunity_loss: Coefficient::Constant(self.immunity_loss),
            infectivity: Coefficient::Constant(self.infectivity),
            recovery: Coefficient::Constant(self.recovery),
        }
    }

    /// Population cap from the recruitment/mortality balance; `None` when
    /// `mu = 0`.
    pub fn population_bound(&self) -> Option<f64> {
        self.parameter_set().population_bound(self.initial.total())
    }

    /// Parses a TOML document, rejecting unknown keys and validating every
    /// invariant. Missing keys take the stock defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse(Box::new(e)))?;
        let scenario = doc.build()?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Canonical TOML with every key written explicitly.
    /// `from_toml(to_toml(s))` reproduces `s` exactly.
    pub fn to_toml(&self) -> String {
        toml::to_string(&ScenarioDoc::from(self)).expect("scenario serializes")
    }
}

fn d_s0() -> f64 {
    0.98
}
fn d_zero() -> f64 {
    0.0
}
fn d_hundredth() -> f64 {
    0.01
}
fn d_mu() -> f64 {
    0.05
}
fn d_epsilon() -> f64 {
    0.03
}
fn d_gamma() -> f64 {
    0.05
}
fn d_eta() -> f64 {
    0.041
}
fn d_k1() -> f64 {
    1.0
}
fn d_tau_max() -> f64 {
    0.1
}
fn d_v_max() -> f64 {
    0.4
}
fn d_tf() -> f64 {
    25.0
}
fn d_phase() -> f64 {
    0.26
}
fn d_beta() -> f64 {
    0.56
}
fn d_lambda() -> f64 {
    0.05
}
fn d_kind() -> String {
    "mass_action".to_owned()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct InitialDoc {
    #[serde(rename = "S0")]
    s0: f64,
    #[serde(rename = "E0")]
    e0: f64,
    #[serde(rename = "I0")]
    i0: f64,
    #[serde(rename = "R0")]
    r0: f64,
}

impl Default for InitialDoc {
    fn default() -> Self {
        Self {
            s0: d_s0(),
            e0: d_zero(),
            i0: d_hundredth(),
            r0: d_hundredth(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RatesDoc {
    mu: f64,
    epsilon: f64,
    gamma: f64,
    eta: f64,
}

impl Default for RatesDoc {
    fn default() -> Self {
        Self {
            mu: d_mu(),
            epsilon: d_epsilon(),
            gamma: d_gamma(),
            eta: d_eta(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct WeightsDoc {
    k1: f64,
    k2: f64,
    k3: f64,
}

impl Default for WeightsDoc {
    fn default() -> Self {
        Self {
            k1: d_k1(),
            k2: d_hundredth(),
            k3: d_hundredth(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BoundsDoc {
    tau_max: f64,
    v_max: f64,
}

impl Default for BoundsDoc {
    fn default() -> Self {
        Self {
            tau_max: d_tau_max(),
            v_max: d_v_max(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ForcingDoc {
    tf: f64,
    per: f64,
    phase: f64,
    beta: f64,
    #[serde(rename = "Lambda")]
    lambda: f64,
}

impl Default for ForcingDoc {
    fn default() -> Self {
        Self {
            tf: d_tf(),
            per: d_zero(),
            phase: d_phase(),
            beta: d_beta(),
            lambda: d_lambda(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct IncidenceDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
}

impl Default for IncidenceDoc {
    fn default() -> Self {
        Self {
            kind: d_kind(),
            alpha: None,
            p: None,
            q: None,
        }
    }
}

impl IncidenceDoc {
    fn build(&self) -> Result<Incidence> {
        let kind = self.kind.clone();
        let require = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::Config(format!("incidence kind `{kind}` requires key `{name}`")))
        };
        let forbid = |name: &str, v: Option<f64>| {
            if v.is_some() {
                Err(Error::Config(format!(
                    "incidence key `{name}` does not apply to kind `{kind}`"
                )))
            } else {
                Ok(())
            }
        };
        match kind.as_str() {
            "mass_action" => {
                forbid("alpha", self.alpha)?;
                forbid("p", self.p)?;
                forbid("q", self.q)?;
                Ok(Incidence::mass_action())
            }
            "saturated" => {
                forbid("p", self.p)?;
                forbid("q", self.q)?;
                Incidence::saturated(require("alpha", self.alpha)?)
            }
            "power" => {
                forbid("alpha", self.alpha)?;
                Incidence::power(require("p", self.p)?, require("q", self.q)?)
            }
            "ratio" => Incidence::ratio(
                require("p", self.p)?,
                require("q", self.q)?,
                require("alpha", self.alpha)?,
            ),
            other => Err(Error::Config(format!(
                "unknown incidence kind `{other}` (expected mass_action, saturated, power or ratio)"
            ))),
        }
    }

    fn from_incidence(incidence: &Incidence) -> Self {
        match *incidence {
            Incidence::MassAction => IncidenceDoc {
                kind: "mass_action".to_owned(),
                ..Default::default()
            },
            Incidence::Saturated { alpha } => IncidenceDoc {
                kind: "saturated".to_owned(),
                alpha: Some(alpha),
                ..Default::default()
            },
            Incidence::Power { p, q } => IncidenceDoc {
                kind: "power".to_owned(),
                p: Some(p),
                q: Some(q),
                ..Default::default()
            },
            Incidence::Ratio { p, q, alpha } => IncidenceDoc {
                kind: "ratio".to_owned(),
                alpha: Some(alpha),
                p: Some(p),
                q: Some(q),
            },
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScenarioDoc {
    initial: InitialDoc,
    rates: RatesDoc,
    weights: WeightsDoc,
    bounds: BoundsDoc,
    forcing: ForcingDoc,
    incidence: IncidenceDoc,
}

impl ScenarioDoc {
    fn build(&self) -> Result<Scenario> {
        Ok(Scenario {
            initial: StateVector::new(
                self.initial.s0,
                self.initial.e0,
                self.initial.i0,
                self.initial.r0,
            ),
            natural_death: self.rates.mu,
            infectivity: self.rates.epsilon,
            recovery: self.rates.gamma,
            immunity_loss: self.rates.eta,
            weights: CostWeights::new(self.weights.k1, self.weights.k2, self.weights.k3)?,
            bounds: ControlBounds::new(self.bounds.tau_max, self.bounds.v_max)?,
            t_end: self.forcing.tf,
            per: self.forcing.per,
            phase: self.forcing.phase,
            transmission_scale: self.forcing.beta,
            recruitment_mean: self.forcing.lambda,
            incidence: self.incidence.build()?,
        })
    }
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        ScenarioDoc {
            initial: InitialDoc {
                s0: s.initial.susceptible,
                e0: s.initial.exposed,
                i0: s.initial.infective,
                r0: s.initial.recovered,
            },
            rates: RatesDoc {
                mu: s.natural_death,
                epsilon: s.infectivity,
                gamma: s.recovery,
                eta: s.immunity_loss,
            },
            weights: WeightsDoc {
                k1: s.weights.infected(),
                k2: s.weights.treatment(),
                k3: s.weights.vaccination(),
            },
            bounds: BoundsDoc {
                tau_max: s.bounds.treatment_max(),
                v_max: s.bounds.vaccination_max(),
            },
            forcing: ForcingDoc {
                tf: s.t_end,
                per: s.per,
                phase: s.phase,
                beta: s.transmission_scale,
                lambda: s.recruitment_mean,
            },
            incidence: IncidenceDoc::from_incidence(&s.incidence),
        }
    }
}

/// The four constant rates a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    NaturalDeath,
    Recovery,
    Infectivity,
    ImmunityLoss,
}

impl SweepParameter {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParameter::NaturalDeath => "mu",
            SweepParameter::Recovery => "gamma",
            SweepParameter::Infectivity => "epsilon",
            SweepParameter::ImmunityLoss => "eta",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(SweepParameter::NaturalDeath),
            "gamma" => Ok(SweepParameter::Recovery),
            "epsilon" => Ok(SweepParameter::Infectivity),
            "eta" => Ok(SweepParameter::ImmunityLoss),
            other => Err(Error::UnknownParameter(other.to_owned())),
        }
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

/// A uniform lattice of values for one swept parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    parameter: SweepParameter,
    from: f64,
    to: f64,
    step: f64,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, from: f64, to: f64, step: f64) -> Result<Self> {
        if !from.is_finite() || !to.is_finite() || from > to {
            return Err(Error::invalid("from", from, "from <= to"));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::invalid("step", step, "step > 0"));
        }
        let count = (to - from) / step;
        if (count - count.round()).abs() > 1e-9 {
            return Err(Error::invalid(
                "step",
                step,
                "(to - from)/step must be an integer",
            ));
        }
        Ok(Self {
            parameter,
            from,
            to,
            step,
        })
    }

    pub fn parameter(&self) -> SweepParameter {
        self.parameter
    }

    pub fn len(&self) -> usize {
        ((self.to - self.from) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.from + k as f64 * self.step)
    }
}

/// One scenario per lattice value, differing from `base` only in the swept
/// parameter.
pub fn expand_sweep(spec: &SweepSpec, base: &Scenario) -> Vec<(f64, Scenario)> {
    spec.values()
        .map(|value| {
            let mut scenario = *base;
            match spec.parameter {
                SweepParameter::NaturalDeath => scenario.natural_death = value,
                SweepParameter::Recovery => scenario.recovery = value,
                SweepParameter::Infectivity => scenario.infectivity = value,
                SweepParameter::ImmunityLoss => scenario.immunity_loss = value,
            }
            (value, scenario)
        })
        .collect()
}
