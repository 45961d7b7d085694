//! Cost evaluation, deviation-gain measurement, and equilibrium checks.
//!
//! The noiseless checks are exact and deterministic: a rejected report cannot
//! move the estimate at all, so a finite probe sweep covers every policy. The
//! noisy checks are statistical: best-response search over an affine policy
//! grid, evaluated on common random numbers so that candidate comparisons are
//! not confounded by sampling noise.

mod cost;
mod deviation;
mod exact;

pub use cost::{estimator_error, ex_ante_cost, ex_post_cost, paired_gain, PairedGain};
pub use deviation::{
    default_policy_grid, deviation_gain, dominant_strategy_check, ex_post_deviation_gain,
};
pub use exact::{noiseless_truth_equilibrium_check, PROBE_STATES};

pub(crate) use exact::invariance_probe;

use alloc::vec::Vec;

use crate::error::Result;
use crate::estimators::EstimatorSpec;
use crate::policies::{PolicyProfile, SensorPolicy};
use crate::rng::RngStream;
use crate::scenario::{sample_world, ScenarioConfig, WorldDraw};

/// One simulated round: the drawn world, every report, and the estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSample {
    pub world: WorldDraw,
    /// One report per slot, in slot order.
    pub reports: Vec<f64>,
    /// Estimator output on `reports`.
    pub estimate: f64,
}

/// Monte Carlo estimate with a normal-approximation 95% confidence half-width
/// (1.96 · sample standard deviation / √samples).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CostEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub samples: usize,
}

/// Outcome of a best-response search for one entity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DeviationReport {
    /// Entity whose policy was varied.
    pub deviator: usize,
    /// Cost of the profile as given.
    pub base_cost: CostEstimate,
    /// Cheapest policy found (the incumbent on ties).
    pub best_policy: SensorPolicy,
    pub best_cost: CostEstimate,
    /// base_cost.mean - best_cost.mean.
    pub gain: f64,
    /// Whether the gain exceeds the combined 95% half-widths.
    pub significant: bool,
}

/// Outcome of a deterministic invariance check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExactCheckReport {
    pub holds: bool,
    /// Present exactly when `holds` is false.
    pub witness: Option<Witness>,
}

/// Report list and estimate demonstrating a violation. Adversarial reports
/// may be infinite; serialization renders non-finite values as the strings
/// "inf" / "-inf" since JSON has no representation for them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    #[cfg_attr(feature = "serde", serde(serialize_with = "serde_floats::slice"))]
    pub reports: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(serialize_with = "serde_floats::value"))]
    pub estimate: f64,
    /// The state every non-deviating report equalled.
    pub expected: f64,
}

#[cfg(feature = "serde")]
mod serde_floats {
    use serde::ser::{SerializeSeq, Serializer};

    fn non_finite_tag(v: f64) -> &'static str {
        if v.is_nan() {
            "nan"
        } else if v > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    pub fn value<S: Serializer>(v: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            serializer.serialize_f64(*v)
        } else {
            serializer.serialize_str(non_finite_tag(*v))
        }
    }

    pub fn slice<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            if v.is_finite() {
                seq.serialize_element(v)?;
            } else {
                seq.serialize_element(non_finite_tag(*v))?;
            }
        }
        seq.end()
    }
}

/// Draws a world, lets every entity report on each of its slots, and
/// aggregates with the estimator.
pub fn simulate_round(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    stream: RngStream,
) -> Result<RoundSample> {
    config.validate()?;
    profile.validate_for(config)?;
    estimator.validate_for(config.total_reports())?;
    let world = sample_world(config, stream);
    let reports = build_reports(config, profile, &world);
    let estimate = estimator.estimate(&reports)?;
    Ok(RoundSample {
        world,
        reports,
        estimate,
    })
}

/// Applies each entity's policy on each of its slots. Slots share the
/// entity's bias but keep their own measurement and jitter shock.
pub(crate) fn build_reports(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    world: &WorldDraw,
) -> Vec<f64> {
    let mut reports = Vec::with_capacity(config.total_reports());
    let mut slot = 0;
    for (entity, &size) in config.coalition_sizes.iter().enumerate() {
        let policy = &profile.policies[entity];
        for _ in 0..size {
            reports.push(policy.apply_with_shock(
                world.z[slot],
                world.theta[entity],
                world.jitter_shock[slot],
            ));
            slot += 1;
        }
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_rng;

    fn noiseless_config(n: usize) -> ScenarioConfig {
        ScenarioConfig::symmetric(n, 1.0, 1.0, 0.0, 17, 100).unwrap()
    }

    #[test]
    fn truthful_noiseless_median_recovers_the_state_exactly() {
        let config = noiseless_config(5);
        let profile = PolicyProfile::uniform(5, SensorPolicy::truthful());
        for r in 0..50 {
            let round =
                simulate_round(&config, &profile, EstimatorSpec::Median, make_rng(17, r)).unwrap();
            assert_eq!(round.estimate, round.world.x);
        }
    }

    #[test]
    fn averaging_attack_lands_on_the_deviators_target() {
        let config = noiseless_config(5);
        let profile = PolicyProfile::uniform(5, SensorPolicy::truthful())
            .with_entity(0, SensorPolicy::averaging_attack(5).unwrap())
            .unwrap();
        for r in 0..50 {
            let round =
                simulate_round(&config, &profile, EstimatorSpec::Mean, make_rng(17, r)).unwrap();
            let target = round.world.x + round.world.theta[0];
            let scale = 1.0 + target.abs();
            assert!(
                (round.estimate - target).abs() <= 1e-12 * scale,
                "estimate {} target {}",
                round.estimate,
                target
            );
        }
    }

    #[test]
    fn trimmed_rejects_any_single_deviation_exactly() {
        let config = noiseless_config(5);
        for (a, b, d) in [(0.0, 0.0, 1e9), (5.0, -3.0, 0.1), (0.0, 0.0, f64::MAX)] {
            let profile = PolicyProfile::uniform(5, SensorPolicy::truthful())
                .with_entity(2, SensorPolicy::new(a, b, d, 0.0).unwrap())
                .unwrap();
            for r in 0..20 {
                let round = simulate_round(
                    &config,
                    &profile,
                    EstimatorSpec::Trimmed { level: 1 },
                    make_rng(17, r),
                )
                .unwrap();
                assert_eq!(round.estimate, round.world.x);
            }
        }
    }

    #[test]
    fn round_estimate_matches_a_reapplication() {
        let config = ScenarioConfig::symmetric(7, 1.0, 1.0, 0.1, 3, 100).unwrap();
        let profile = PolicyProfile::uniform(7, SensorPolicy::noisy_equilibrium());
        for r in 0..20 {
            let round =
                simulate_round(&config, &profile, EstimatorSpec::Median, make_rng(3, r)).unwrap();
            assert_eq!(
                round.estimate,
                EstimatorSpec::Median.estimate(&round.reports).unwrap()
            );
        }
    }

    #[test]
    fn coalition_slots_share_the_bias() {
        let config =
            ScenarioConfig::with_coalitions(alloc::vec![2, 1, 1], 1.0, 1.0, 0.0, 9, 100).unwrap();
        // Entity 0 reports z + θ on both of its slots.
        let profile = PolicyProfile::uniform(3, SensorPolicy::truthful())
            .with_entity(0, SensorPolicy::noisy_equilibrium())
            .unwrap();
        let round =
            simulate_round(&config, &profile, EstimatorSpec::Median, make_rng(9, 0)).unwrap();
        let w = &round.world;
        assert_eq!(round.reports[0], w.z[0] + w.theta[0]);
        assert_eq!(round.reports[1], w.z[1] + w.theta[0]);
        assert_eq!(round.reports[2], w.z[2]);
    }

    #[test]
    fn infeasible_trim_level_is_rejected() {
        let config = noiseless_config(4);
        let profile = PolicyProfile::uniform(4, SensorPolicy::truthful());
        let err = simulate_round(
            &config,
            &profile,
            EstimatorSpec::Trimmed { level: 2 },
            make_rng(0, 0),
        )
        .unwrap_err();
        assert_eq!(
            err,
            crate::error::Error::TrimLevelTooHigh {
                reports: 4,
                level: 2
            }
        );
    }
}
