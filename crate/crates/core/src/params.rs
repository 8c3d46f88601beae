//! Time-varying model coefficients.
//!
//! Every rate in the model is an evaluable scalar function of time, either a
//! constant or a cosine-modulated mean `a·(1 + amp·cos(w t + phase))`. The
//! latter covers seasonal forcing with any phase and either sign of
//! modulation (`amp` may be negative).

use crate::error::{Error, Result};

/// One scalar coefficient of the model, evaluable at any time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `mean · (1 + relative_amplitude · cos(angular_frequency · t + phase))`.
    Cosine {
        mean: f64,
        relative_amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
}

impl Coefficient {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Cosine {
                mean,
                relative_amplitude,
                angular_frequency,
                phase,
            } => mean * (1.0 + relative_amplitude * (angular_frequency * t + phase).cos()),
        }
    }

    /// Smallest value the coefficient attains over a full period.
    pub fn min_value(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Cosine {
                mean,
                relative_amplitude,
                ..
            } => mean - (mean * relative_amplitude).abs(),
        }
    }

    /// Largest value the coefficient attains over a full period.
    pub fn max_value(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Cosine {
                mean,
                relative_amplitude,
                ..
            } => mean + (mean * relative_amplitude).abs(),
        }
    }

    /// Period of the modulation; `None` for constants.
    pub fn period(&self) -> Option<f64> {
        match *self {
            Coefficient::Constant(_) => None,
            Coefficient::Cosine {
                angular_frequency, ..
            } => Some(std::f64::consts::TAU / angular_frequency),
        }
    }
}

/// The six time-varying coefficients of the model, named by role.
///
/// Recruitment is the inflow of new susceptibles, transmission scales the
/// incidence function, natural death removes from every compartment,
/// immunity loss returns recovered to susceptible, infectivity moves exposed
/// to infective, and recovery moves infective to recovered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    pub recruitment: Coefficient,
    pub transmission: Coefficient,
    pub natural_death: Coefficient,
    pub immunity_loss: Coefficient,
    pub infectivity: Coefficient,
    pub recovery: Coefficient,
}

impl ParameterSet {
    /// Checks that death and recruitment rates never go negative.
    pub fn validate(&self) -> Result<()> {
        let mu_min = self.natural_death.min_value();
        if !mu_min.is_finite() || mu_min < 0.0 {
            return Err(Error::invalid("mu", mu_min, "mu(t) >= 0 on the horizon"));
        }
        let lambda_min = self.recruitment.min_value();
        if !lambda_min.is_finite() || lambda_min < 0.0 {
            return Err(Error::invalid(
                "Lambda",
                lambda_min,
                "Lambda(t) >= 0 on the horizon",
            ));
        }
        Ok(())
    }

    /// Upper bound `K = N0 + sup Λ / inf μ` on the total population.
    ///
    /// The total obeys `N' = Λ(t) − μ(t)·N`, so it can never exceed this
    /// value. Undefined (`None`) when the death rate can reach zero.
    pub fn population_bound(&self, n0: f64) -> Option<f64> {
        let mu_min = self.natural_death.min_value();
        if mu_min > 0.0 {
            Some(n0 + self.recruitment.max_value() / mu_min)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_ignores_time() {
        let c = Coefficient::Constant(0.05);
        assert_eq!(c.eval(0.0), 0.05);
        assert_eq!(c.eval(17.3), 0.05);
        assert_eq!(c.min_value(), 0.05);
        assert_eq!(c.max_value(), 0.05);
        assert_eq!(c.period(), None);
    }

    #[test]
    fn cosine_is_periodic() {
        let c = Coefficient::Cosine {
            mean: 0.05,
            relative_amplitude: 0.8,
            angular_frequency: std::f64::consts::TAU,
            phase: 0.26,
        };
        let period = c.period().unwrap();
        assert!((period - 1.0).abs() < 1e-15);
        for k in 0..100 {
            let t = 0.173 * k as f64;
            assert!((c.eval(t) - c.eval(t + period)).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_range_is_tight() {
        let c = Coefficient::Cosine {
            mean: 0.56,
            relative_amplitude: -0.8,
            angular_frequency: std::f64::consts::TAU,
            phase: 0.26,
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..=10_000 {
            let v = c.eval(k as f64 / 10_000.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo >= c.min_value() - 1e-12);
        assert!(hi <= c.max_value() + 1e-12);
        assert!((lo - c.min_value()).abs() < 1e-6);
        assert!((hi - c.max_value()).abs() < 1e-6);
    }

    #[test]
    fn population_bound_needs_positive_death_rate() {
        let p = ParameterSet {
            recruitment: Coefficient::Constant(0.05),
            transmission: Coefficient::Constant(0.56),
            natural_death: Coefficient::Constant(0.05),
            immunity_loss: Coefficient::Constant(0.041),
            infectivity: Coefficient::Constant(0.03),
            recovery: Coefficient::Constant(0.05),
        };
        assert_eq!(p.population_bound(1.0), Some(2.0));
        let zero_death = ParameterSet {
            natural_death: Coefficient::Constant(0.0),
            ..p
        };
        assert_eq!(zero_death.population_bound(1.0), None);
        zero_death.validate().unwrap();

        let negative = ParameterSet {
            natural_death: Coefficient::Constant(-0.01),
            ..p
        };
        assert!(negative.validate().is_err());
    }
}
