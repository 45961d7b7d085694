//! Monte Carlo cost evaluation.
//!
//! Replicate r of an evaluation always uses stream `(config.seed, r)`, so two
//! evaluations that differ only in a policy or an estimator see identical
//! worlds — common random numbers by construction.

use alloc::format;

use super::{build_reports, CostEstimate};
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::policies::{PolicyProfile, SensorPolicy};
use crate::rng::RngStream;
use crate::scenario::{sample_world_conditioned, Conditioning, ScenarioConfig};

/// Streaming mean/variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RunningMoments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub(crate) fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation (n - 1 denominator).
    pub(crate) fn sample_sd(&self) -> f64 {
        if self.count > 1 {
            libm::sqrt(self.m2 / (self.count - 1) as f64)
        } else {
            0.0
        }
    }

    pub(crate) fn std_error(&self) -> f64 {
        if self.count > 1 {
            self.sample_sd() / libm::sqrt(self.count as f64)
        } else {
            0.0
        }
    }

    pub(crate) fn cost_estimate(&self) -> CostEstimate {
        CostEstimate {
            mean: self.mean,
            half_width_95: 1.96 * self.std_error(),
            samples: self.count,
        }
    }
}

/// What the per-draw loss compares the estimate against.
#[derive(Debug, Clone, Copy)]
enum Target {
    /// |x + θ_entity - estimate|: the sensor's own cost.
    Sensor(usize),
    /// |x - estimate|: the receiver's estimation error.
    Receiver,
}

fn validate_common(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    samples: usize,
) -> Result<()> {
    config.validate()?;
    profile.validate_for(config)?;
    estimator.validate_for(config.total_reports())?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    Ok(())
}

fn check_entity(config: &ScenarioConfig, entity: usize) -> Result<()> {
    if entity >= config.n_sensors {
        return Err(Error::InvalidArgument(format!(
            "entity {entity} out of range for {} sensors",
            config.n_sensors
        )));
    }
    Ok(())
}

fn monte_carlo_cost(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    target: Target,
    conditioning: Option<(usize, Conditioning)>,
    samples: usize,
) -> Result<CostEstimate> {
    validate_common(config, profile, estimator, samples)?;
    let mut acc = RunningMoments::default();
    for r in 0..samples {
        let world =
            sample_world_conditioned(config, RngStream::new(config.seed, r as u64), conditioning);
        let reports = build_reports(config, profile, &world);
        let estimate = estimator.estimate(&reports)?;
        let goal = match target {
            Target::Sensor(entity) => world.x + world.theta[entity],
            Target::Receiver => world.x,
        };
        acc.push((goal - estimate).abs());
    }
    Ok(acc.cost_estimate())
}

/// Ex ante cost of `entity`: Monte Carlo average of |x + θ - estimate| over
/// `samples` replicates with streams `(config.seed, 0..samples)`.
pub fn ex_ante_cost(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    samples: usize,
) -> Result<CostEstimate> {
    check_entity(config, entity)?;
    monte_carlo_cost(
        config,
        profile,
        estimator,
        Target::Sensor(entity),
        None,
        samples,
    )
}

/// Receiver-side estimation error: Monte Carlo average of |x - estimate|.
pub fn estimator_error(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    samples: usize,
) -> Result<CostEstimate> {
    monte_carlo_cost(config, profile, estimator, Target::Receiver, None, samples)
}

/// Ex post cost of `entity`: as [`ex_ante_cost`], but the conditioned
/// quantities stay fixed across replicates and everything else is redrawn.
pub fn ex_post_cost(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    conditioning: Conditioning,
    samples: usize,
) -> Result<CostEstimate> {
    check_entity(config, entity)?;
    conditioning.validate()?;
    monte_carlo_cost(
        config,
        profile,
        estimator,
        Target::Sensor(entity),
        Some((entity, conditioning)),
        samples,
    )
}

/// Paired comparison of the incumbent against an alternative policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedGain {
    /// Mean of (incumbent loss - alternative loss) per replicate.
    pub mean_gain: f64,
    pub std_error: f64,
    /// mean_gain / std_error.
    pub z_score: f64,
    pub samples: usize,
}

/// Evaluates the per-replicate loss difference between the profile as given
/// and the profile with `entity` switched to `alternative`, on shared worlds.
/// A positive, significant gain refutes the incumbent as a best response.
pub fn paired_gain(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    alternative: SensorPolicy,
    samples: usize,
) -> Result<PairedGain> {
    validate_common(config, profile, estimator, samples)?;
    check_entity(config, entity)?;
    let alt_profile = profile.with_entity(entity, alternative)?;
    let mut acc = RunningMoments::default();
    for r in 0..samples {
        let world = sample_world_conditioned(config, RngStream::new(config.seed, r as u64), None);
        let goal = world.x + world.theta[entity];
        let base = estimator.estimate(&build_reports(config, profile, &world))?;
        let alt = estimator.estimate(&build_reports(config, &alt_profile, &world))?;
        acc.push((goal - base).abs() - (goal - alt).abs());
    }
    let mean_gain = acc.mean();
    let std_error = acc.std_error();
    let z_score = if std_error > 0.0 {
        mean_gain / std_error
    } else if mean_gain == 0.0 {
        0.0
    } else if mean_gain > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(PairedGain {
        mean_gain,
        std_error,
        z_score,
        samples,
    })
}
