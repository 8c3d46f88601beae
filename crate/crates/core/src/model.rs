//! Domain types and the right-hand sides of the state and costate systems.
//!
//! The state splits the population into susceptible, exposed, infective and
//! recovered fractions. Two controls act on it: treatment moves infectives
//! to recovered, vaccination moves susceptibles to recovered. The costate
//! carries one multiplier per compartment; its dynamics are the negated
//! gradient of the Hamiltonian with respect to the state, and the optimal
//! controls are closed-form clamps derived from the stationarity of the
//! Hamiltonian in the control variables.

use std::ops::{Add, Mul, Neg};

use crate::error::{Error, Result};
use crate::incidence::Incidence;
use crate::params::ParameterSet;

/// Population fractions per compartment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVector {
    pub susceptible: f64,
    pub exposed: f64,
    pub infective: f64,
    pub recovered: f64,
}

impl StateVector {
    pub const ZERO: Self = Self {
        susceptible: 0.0,
        exposed: 0.0,
        infective: 0.0,
        recovered: 0.0,
    };

    pub fn new(susceptible: f64, exposed: f64, infective: f64, recovered: f64) -> Self {
        Self {
            susceptible,
            exposed,
            infective,
            recovered,
        }
    }

    /// Total population `N`, always recomputed from the components.
    pub fn total(&self) -> f64 {
        self.susceptible + self.exposed + self.infective + self.recovered
    }

    pub fn is_finite(&self) -> bool {
        self.susceptible.is_finite()
            && self.exposed.is_finite()
            && self.infective.is_finite()
            && self.recovered.is_finite()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.susceptible,
            self.exposed,
            self.infective,
            self.recovered,
        ]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl Add for StateVector {
    type Output = StateVector;
    fn add(self, rhs: StateVector) -> StateVector {
        StateVector {
            susceptible: self.susceptible + rhs.susceptible,
            exposed: self.exposed + rhs.exposed,
            infective: self.infective + rhs.infective,
            recovered: self.recovered + rhs.recovered,
        }
    }
}

impl Mul<f64> for StateVector {
    type Output = StateVector;
    fn mul(self, k: f64) -> StateVector {
        StateVector {
            susceptible: self.susceptible * k,
            exposed: self.exposed * k,
            infective: self.infective * k,
            recovered: self.recovered * k,
        }
    }
}

/// Costate (shadow price) per compartment, zero at the final time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdjointVector {
    pub susceptible: f64,
    pub exposed: f64,
    pub infective: f64,
    pub recovered: f64,
}

impl AdjointVector {
    pub const ZERO: Self = Self {
        susceptible: 0.0,
        exposed: 0.0,
        infective: 0.0,
        recovered: 0.0,
    };

    pub fn new(susceptible: f64, exposed: f64, infective: f64, recovered: f64) -> Self {
        Self {
            susceptible,
            exposed,
            infective,
            recovered,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.susceptible.is_finite()
            && self.exposed.is_finite()
            && self.infective.is_finite()
            && self.recovered.is_finite()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.susceptible,
            self.exposed,
            self.infective,
            self.recovered,
        ]
    }
}

impl Add for AdjointVector {
    type Output = AdjointVector;
    fn add(self, rhs: AdjointVector) -> AdjointVector {
        AdjointVector {
            susceptible: self.susceptible + rhs.susceptible,
            exposed: self.exposed + rhs.exposed,
            infective: self.infective + rhs.infective,
            recovered: self.recovered + rhs.recovered,
        }
    }
}

impl Mul<f64> for AdjointVector {
    type Output = AdjointVector;
    fn mul(self, k: f64) -> AdjointVector {
        AdjointVector {
            susceptible: self.susceptible * k,
            exposed: self.exposed * k,
            infective: self.infective * k,
            recovered: self.recovered * k,
        }
    }
}

impl Neg for AdjointVector {
    type Output = AdjointVector;
    fn neg(self) -> AdjointVector {
        self * -1.0
    }
}

/// Per-unit-time control rates, always inside their box bounds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlVector {
    pub treatment: f64,
    pub vaccination: f64,
}

impl ControlVector {
    pub const ZERO: Self = Self {
        treatment: 0.0,
        vaccination: 0.0,
    };

    pub fn new(treatment: f64, vaccination: f64) -> Self {
        Self {
            treatment,
            vaccination,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.treatment.is_finite() && self.vaccination.is_finite()
    }

    pub fn midpoint(a: &ControlVector, b: &ControlVector) -> ControlVector {
        ControlVector {
            treatment: 0.5 * (a.treatment + b.treatment),
            vaccination: 0.5 * (a.vaccination + b.vaccination),
        }
    }
}

/// Cost weights `k1, k2, k3` on infected count, squared treatment effort and
/// squared vaccination effort. The control formulas divide by `k2` and `k3`,
/// so those must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    infected: f64,
    treatment: f64,
    vaccination: f64,
}

impl CostWeights {
    pub fn new(infected: f64, treatment: f64, vaccination: f64) -> Result<Self> {
        if !infected.is_finite() || infected < 0.0 {
            return Err(Error::invalid("k1", infected, "k1 >= 0"));
        }
        if !treatment.is_finite() || treatment <= 0.0 {
            return Err(Error::invalid("k2", treatment, "k2 > 0"));
        }
        if !vaccination.is_finite() || vaccination <= 0.0 {
            return Err(Error::invalid("k3", vaccination, "k3 > 0"));
        }
        Ok(Self {
            infected,
            treatment,
            vaccination,
        })
    }

    pub fn infected(&self) -> f64 {
        self.infected
    }

    pub fn treatment(&self) -> f64 {
        self.treatment
    }

    pub fn vaccination(&self) -> f64 {
        self.vaccination
    }
}

/// Upper limits of the admissible control box `[0, tau_max] × [0, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBounds {
    treatment_max: f64,
    vaccination_max: f64,
}

impl ControlBounds {
    pub fn new(treatment_max: f64, vaccination_max: f64) -> Result<Self> {
        if !treatment_max.is_finite() || treatment_max <= 0.0 {
            return Err(Error::invalid("tau_max", treatment_max, "tau_max > 0"));
        }
        if !vaccination_max.is_finite() || vaccination_max <= 0.0 {
            return Err(Error::invalid("v_max", vaccination_max, "v_max > 0"));
        }
        Ok(Self {
            treatment_max,
            vaccination_max,
        })
    }

    pub fn treatment_max(&self) -> f64 {
        self.treatment_max
    }

    pub fn vaccination_max(&self) -> f64 {
        self.vaccination_max
    }

    /// Hard clamp onto the box.
    pub fn clamp(&self, raw: ControlVector) -> ControlVector {
        ControlVector {
            treatment: raw.treatment.clamp(0.0, self.treatment_max),
            vaccination: raw.vaccination.clamp(0.0, self.vaccination_max),
        }
    }
}

/// Time derivative of the state.
///
/// Each flow between compartments is computed once and entered with opposite
/// signs on its two sides, so the component sum telescopes to
/// `Λ(t) − μ(t)·N` exactly up to rounding.
pub fn state_rhs(
    t: f64,
    x: &StateVector,
    u: &ControlVector,
    params: &ParameterSet,
    incidence: &Incidence,
) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(Error::NonFinite {
            operation: "state_rhs",
            what: "time",
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite {
            operation: "state_rhs",
            what: "state",
        });
    }
    if !u.is_finite() {
        return Err(Error::NonFinite {
            operation: "state_rhs",
            what: "control",
        });
    }

    let total = x.total();
    let mortality = params.natural_death.eval(t);
    let infection =
        params.transmission.eval(t) * incidence.value(x.susceptible, total, x.infective);
    let progression = params.infectivity.eval(t) * x.exposed;
    let recovering = params.recovery.eval(t) * x.infective;
    let waning = params.immunity_loss.eval(t) * x.recovered;
    let treated = u.treatment * x.infective;
    let vaccinated = u.vaccination * x.susceptible;

    Ok(StateVector {
        susceptible: params.recruitment.eval(t) - infection - mortality * x.susceptible + waning
            - vaccinated,
        exposed: infection - mortality * x.exposed - progression,
        infective: progression - mortality * x.infective - recovering - treated,
        recovered: recovering - mortality * x.recovered - waning + treated + vaccinated,
    })
}

/// Time derivative of the costate: the negated state-gradient of the
/// Hamiltonian, with the incidence differentiated through `N` as well.
pub fn adjoint_rhs(
    t: f64,
    costate: &AdjointVector,
    x: &StateVector,
    u: &ControlVector,
    params: &ParameterSet,
    incidence: &Incidence,
    weights: &CostWeights,
) -> Result<AdjointVector> {
    if !t.is_finite() {
        return Err(Error::NonFinite {
            operation: "adjoint_rhs",
            what: "time",
        });
    }
    if !costate.is_finite() {
        return Err(Error::NonFinite {
            operation: "adjoint_rhs",
            what: "costate",
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite {
            operation: "adjoint_rhs",
            what: "state",
        });
    }
    if !u.is_finite() {
        return Err(Error::NonFinite {
            operation: "adjoint_rhs",
            what: "control",
        });
    }

    let total = x.total();
    let d_s = incidence.d_susceptible(x.susceptible, total, x.infective);
    let d_n = incidence.d_total(x.susceptible, total, x.infective);
    let d_i = incidence.d_infective(x.susceptible, total, x.infective);

    let mortality = params.natural_death.eval(t);
    let progression_rate = params.infectivity.eval(t);
    let recovery_rate = params.recovery.eval(t);
    let waning_rate = params.immunity_loss.eval(t);
    // (p1 − p2)·β(t) multiplies every incidence-derivative term.
    let spread = (costate.susceptible - costate.exposed) * params.transmission.eval(t);

    Ok(AdjointVector {
        susceptible: spread * (d_s + d_n) + costate.susceptible * (mortality + u.vaccination)
            - costate.recovered * u.vaccination,
        exposed: spread * d_n + costate.exposed * (mortality + progression_rate)
            - costate.infective * progression_rate,
        infective: costate.infective * (mortality + recovery_rate + u.treatment)
            + spread * (d_n + d_i)
            - costate.recovered * (recovery_rate + u.treatment)
            - weights.infected(),
        recovered: spread * d_n + mortality * costate.recovered - waning_rate * costate.susceptible
            + waning_rate * costate.recovered,
    })
}

/// Pointwise minimizer of the Hamiltonian over the control box.
///
/// Both components are clamped quadratic vertices:
/// `T = clamp(I·(p3 − p4) / (2 k2))` and `V = clamp(S·(p1 − p4) / (2 k3))`.
pub fn control_update(
    x: &StateVector,
    costate: &AdjointVector,
    weights: &CostWeights,
    bounds: &ControlBounds,
) -> ControlVector {
    bounds.clamp(ControlVector {
        treatment: x.infective * (costate.infective - costate.recovered)
            / (2.0 * weights.treatment()),
        vaccination: x.susceptible * (costate.susceptible - costate.recovered)
            / (2.0 * weights.vaccination()),
    })
}

/// Running cost plus costate-weighted dynamics; used for diagnostics and for
/// checking pointwise minimality of converged controls.
pub fn hamiltonian(
    t: f64,
    x: &StateVector,
    costate: &AdjointVector,
    u: &ControlVector,
    params: &ParameterSet,
    incidence: &Incidence,
    weights: &CostWeights,
) -> Result<f64> {
    let f = state_rhs(t, x, u, params, incidence)?;
    Ok(weights.infected() * x.infective
        + weights.treatment() * u.treatment * u.treatment
        + weights.vaccination() * u.vaccination * u.vaccination
        + costate.susceptible * f.susceptible
        + costate.exposed * f.exposed
        + costate.infective * f.infective
        + costate.recovered * f.recovered)
}
