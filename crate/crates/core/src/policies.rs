//! Sensor reporting rules.
//!
//! Policies are affine in the measurement and the private bias, with optional
//! Gaussian report jitter: y = a·z + b·θ + d + ε. The family contains every
//! named strategy in this model — truth-telling, the averaging and rejection
//! attacks, and the noisy-median reporting equilibrium — and gives the
//! best-response search a finite parameterization. Parameters are fixed
//! before any draw is observed; only the report depends on the realization.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scenario::ScenarioConfig;

/// Affine report rule y = a·z + b·θ + d + ε with ε ~ N(0, jitter_sd²).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SensorPolicy {
    /// Gain on the measurement z.
    pub a: f64,
    /// Gain on the private bias θ.
    pub b: f64,
    /// Constant offset.
    pub d: f64,
    /// Standard deviation of the additive report noise ε; zero makes the
    /// policy deterministic.
    pub jitter_sd: f64,
}

impl SensorPolicy {
    pub fn new(a: f64, b: f64, d: f64, jitter_sd: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "policy coefficients must be finite, got a={a}, b={b}, d={d}"
            )));
        }
        if !jitter_sd.is_finite() || jitter_sd < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "jitter_sd must be finite and nonnegative, got {jitter_sd}"
            )));
        }
        Ok(Self { a, b, d, jitter_sd })
    }

    /// Report the measurement as-is: y = z (and y = x when noiseless).
    pub const fn truthful() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            d: 0.0,
            jitter_sd: 0.0,
        }
    }

    /// Deviation that captures the averaging estimator with `n` reports:
    /// y = z + n·θ, which lands the estimate exactly on x + θ when everyone
    /// else reports x.
    pub fn averaging_attack(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "the averaging attack needs at least 2 sensors, got {n}"
            )));
        }
        Ok(Self {
            a: 1.0,
            b: n as f64,
            d: 0.0,
            jitter_sd: 0.0,
        })
    }

    /// Deviation against rejection averaging with `n` reports and the given
    /// level: y = z + (n - 2·level)·θ.
    pub fn trimmed_attack(n: usize, level: usize) -> Result<Self> {
        if n < 2 * level + 1 {
            return Err(Error::InvalidArgument(format!(
                "the rejection attack needs n >= 2*level + 1, got n={n}, level={level}"
            )));
        }
        Ok(Self {
            a: 1.0,
            b: (n - 2 * level) as f64,
            d: 0.0,
            jitter_sd: 0.0,
        })
    }

    /// Noisy-median reporting equilibrium: y = z + θ.
    pub const fn noisy_equilibrium() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            d: 0.0,
            jitter_sd: 0.0,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.jitter_sd == 0.0
    }

    /// Report given an explicit standard-normal jitter shock. Policies with
    /// zero jitter ignore the shock, so one shock per slot serves every
    /// candidate policy as a common random number.
    #[inline]
    pub fn apply_with_shock(&self, z: f64, theta: f64, shock: f64) -> f64 {
        self.a * z + self.b * theta + self.d + self.jitter_sd * shock
    }
}

/// Applies a policy to one measurement/bias pair, drawing the jitter from the
/// given stream. Deterministic policies never touch the stream.
pub fn apply_policy(policy: &SensorPolicy, z: f64, theta: f64, stream: RngStream) -> f64 {
    let shock = if policy.jitter_sd > 0.0 {
        stream.sampler().standard_normal()
    } else {
        0.0
    };
    policy.apply_with_shock(z, theta, shock)
}

/// One policy per strategic entity; every slot of a coalition applies its
/// entity's policy (with per-slot measurements and jitter shocks).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PolicyProfile {
    pub policies: Vec<SensorPolicy>,
}

impl PolicyProfile {
    pub fn new(policies: Vec<SensorPolicy>) -> Self {
        Self { policies }
    }

    /// Every entity plays the same policy.
    pub fn uniform(n_sensors: usize, policy: SensorPolicy) -> Self {
        Self {
            policies: alloc::vec![policy; n_sensors],
        }
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    /// Copy of this profile with one entity's policy replaced.
    pub fn with_entity(&self, entity: usize, policy: SensorPolicy) -> Result<Self> {
        if entity >= self.policies.len() {
            return Err(Error::InvalidArgument(format!(
                "entity {entity} out of range for a {}-entity profile",
                self.policies.len()
            )));
        }
        let mut policies = self.policies.clone();
        policies[entity] = policy;
        Ok(Self { policies })
    }

    pub fn validate_for(&self, config: &ScenarioConfig) -> Result<()> {
        if self.policies.len() != config.n_sensors {
            return Err(Error::InvalidScenario(format!(
                "profile has {} policies for {} sensors",
                self.policies.len(),
                config.n_sensors
            )));
        }
        Ok(())
    }
}
