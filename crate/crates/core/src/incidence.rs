//! Built-in incidence functions.
//!
//! The incidence `φ(S, N, I)` is the rate at which susceptibles become
//! exposed, scaled by the transmission coefficient. Every built-in kind
//! vanishes when either `S = 0` or `I = 0`, and the per-infective ratio
//! `φ/I` stays bounded as `I → 0`, which is what keeps the disease-free
//! state invariant and the adjoint system well defined.

use crate::error::{Error, Result};

/// An incidence function with analytic partial derivatives.
///
/// Partials are taken with respect to the three slots `(S, N, I)`
/// independently; the chain rule through `N = S + E + I + R` is applied by
/// the callers that need it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Incidence {
    /// `φ = S·I`
    MassAction,
    /// `φ = S·I / (1 + α·I)`
    Saturated { alpha: f64 },
    /// `φ = I^p · S^q`
    Power { p: f64, q: f64 },
    /// `φ = S·I^p / (1 + α·I^q)`
    Ratio { p: f64, q: f64, alpha: f64 },
}

impl Incidence {
    pub fn mass_action() -> Self {
        Incidence::MassAction
    }

    pub fn saturated(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::invalid("alpha", alpha, "alpha >= 0"));
        }
        Ok(Incidence::Saturated { alpha })
    }

    /// Exponents below one would make the derivatives blow up at the
    /// boundary of the admissible region, so they are rejected.
    pub fn power(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::invalid("p", p, "p >= 1"));
        }
        if !q.is_finite() || q < 1.0 {
            return Err(Error::invalid("q", q, "q >= 1"));
        }
        Ok(Incidence::Power { p, q })
    }

    pub fn ratio(p: f64, q: f64, alpha: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::invalid("p", p, "p >= 1"));
        }
        if !q.is_finite() || q < 1.0 {
            return Err(Error::invalid("q", q, "q >= 1"));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::invalid("alpha", alpha, "alpha >= 0"));
        }
        Ok(Incidence::Ratio { p, q, alpha })
    }

    /// `φ(S, N, I)`.
    pub fn value(&self, s: f64, _n: f64, i: f64) -> f64 {
        match *self {
            Incidence::MassAction => s * i,
            Incidence::Saturated { alpha } => s * i / (1.0 + alpha * i),
            Incidence::Power { p, q } => i.powf(p) * s.powf(q),
            Incidence::Ratio { p, q, alpha } => s * i.powf(p) / (1.0 + alpha * i.powf(q)),
        }
    }

    /// `∂φ/∂S`.
    pub fn d_susceptible(&self, s: f64, _n: f64, i: f64) -> f64 {
        match *self {
            Incidence::MassAction => i,
            Incidence::Saturated { alpha } => i / (1.0 + alpha * i),
            Incidence::Power { p, q } => q * i.powf(p) * s.powf(q - 1.0),
            Incidence::Ratio { p, q, alpha } => i.powf(p) / (1.0 + alpha * i.powf(q)),
        }
    }

    /// `∂φ/∂N`; identically zero for every built-in kind, kept explicit
    /// because the adjoint equations carry this term for general `φ`.
    pub fn d_total(&self, _s: f64, _n: f64, _i: f64) -> f64 {
        0.0
    }

    /// `∂φ/∂I`.
    pub fn d_infective(&self, s: f64, _n: f64, i: f64) -> f64 {
        match *self {
            Incidence::MassAction => s,
            Incidence::Saturated { alpha } => {
                let denom = 1.0 + alpha * i;
                s / (denom * denom)
            }
            Incidence::Power { p, q } => p * i.powf(p - 1.0) * s.powf(q),
            Incidence::Ratio { p, q, alpha } => {
                let iq = i.powf(q);
                let denom = 1.0 + alpha * iq;
                s * i.powf(p - 1.0) * (p * denom - alpha * q * iq) / (denom * denom)
            }
        }
    }

    /// The ratio `f = φ/I`, continued analytically to `I = 0`.
    ///
    /// At `I = 0` this evaluates the limit: `S` for mass action and
    /// saturated, `S^q` for the power kind with `p = 1` (zero for `p > 1`),
    /// and `S` for the ratio kind with `p = 1` (zero for `p > 1`).
    pub fn per_infective(&self, s: f64, _n: f64, i: f64) -> f64 {
        match *self {
            Incidence::MassAction => s,
            Incidence::Saturated { alpha } => s / (1.0 + alpha * i),
            Incidence::Power { p, q } => i.powf(p - 1.0) * s.powf(q),
            Incidence::Ratio { p, q, alpha } => s * i.powf(p - 1.0) / (1.0 + alpha * i.powf(q)),
        }
    }
}
