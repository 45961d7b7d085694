//! Best-response search over a policy grid with common random numbers.
//!
//! Every candidate is scored on the same replicate streams, and the other
//! entities' reports are computed once per replicate, so comparing candidates
//! costs one report evaluation per replicate instead of a full round.

use alloc::vec::Vec;

use super::cost::RunningMoments;
use super::{build_reports, CostEstimate, DeviationReport};
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::policies::{PolicyProfile, SensorPolicy};
use crate::rng::RngStream;
use crate::scenario::{sample_world_conditioned, Conditioning, ScenarioConfig};

/// Default affine search grid: gains a, b over [-1, 3] in steps of 0.25,
/// offsets d over [-2, 2] in steps of 0.5, jitter σ in {0, 0.5, 1}. Brackets
/// every preset policy with margin; 7803 candidates.
pub fn default_policy_grid() -> Vec<SensorPolicy> {
    let mut grid = Vec::with_capacity(17 * 17 * 9 * 3);
    for ia in 0..=16 {
        let a = -1.0 + 0.25 * ia as f64;
        for ib in 0..=16 {
            let b = -1.0 + 0.25 * ib as f64;
            for id in 0..=8 {
                let d = -2.0 + 0.5 * id as f64;
                for jitter_sd in [0.0, 0.5, 1.0] {
                    grid.push(SensorPolicy { a, b, d, jitter_sd });
                }
            }
        }
    }
    grid
}

/// Ex ante best-response search: every grid policy is substituted for
/// `entity` (all other policies fixed) and costed on common random numbers.
/// The incumbent is always part of the comparison; ties go to the incumbent,
/// then to the lowest grid index.
pub fn deviation_gain(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    grid: &[SensorPolicy],
    samples: usize,
) -> Result<DeviationReport> {
    deviation_search(config, profile, estimator, entity, None, grid, samples)
}

/// Ex post variant of [`deviation_gain`]: the conditioned quantities stay
/// fixed across replicates.
pub fn ex_post_deviation_gain(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    conditioning: Conditioning,
    grid: &[SensorPolicy],
    samples: usize,
) -> Result<DeviationReport> {
    conditioning.validate()?;
    deviation_search(
        config,
        profile,
        estimator,
        entity,
        Some(conditioning),
        grid,
        samples,
    )
}

/// Checks whether the unit-gain reporting policy stays a best response for
/// entity 0 against each opponent profile in turn — including random or
/// faulty opponents. Dominance is supported when no report shows a
/// significant positive gain.
pub fn dominant_strategy_check(
    config: &ScenarioConfig,
    estimator: EstimatorSpec,
    opponent_profiles: &[PolicyProfile],
    grid: &[SensorPolicy],
    samples: usize,
) -> Result<Vec<DeviationReport>> {
    if estimator != EstimatorSpec::Median {
        return Err(Error::InvalidArgument(
            "the dominant-strategy check is defined for the median estimator".into(),
        ));
    }
    if opponent_profiles.is_empty() {
        return Err(Error::InvalidArgument("no opponent profiles given".into()));
    }
    let entity = 0;
    opponent_profiles
        .iter()
        .map(|opponents| {
            let profile = opponents.with_entity(entity, SensorPolicy::noisy_equilibrium())?;
            deviation_gain(config, &profile, estimator, entity, grid, samples)
        })
        .collect()
}

fn deviation_search(
    config: &ScenarioConfig,
    profile: &PolicyProfile,
    estimator: EstimatorSpec,
    entity: usize,
    conditioning: Option<Conditioning>,
    grid: &[SensorPolicy],
    samples: usize,
) -> Result<DeviationReport> {
    config.validate()?;
    profile.validate_for(config)?;
    estimator.validate_for(config.total_reports())?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("policy grid is empty".into()));
    }
    if entity >= config.n_sensors {
        return Err(Error::InvalidArgument(alloc::format!(
            "entity {entity} out of range for {} sensors",
            config.n_sensors
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }

    let incumbent = profile.policies[entity];
    let workset = Workset::build(config, profile, estimator, entity, conditioning, samples);
    let base_cost = workset.evaluate(&incumbent)?;

    let mut best: Option<(usize, CostEstimate)> = None;
    for (index, candidate) in grid.iter().enumerate() {
        let cost = if *candidate == incumbent {
            base_cost
        } else {
            workset.evaluate(candidate)?
        };
        let improves = match &best {
            Some((_, best_cost)) => cost.mean < best_cost.mean,
            None => cost.mean < base_cost.mean,
        };
        if improves {
            best = Some((index, cost));
        }
    }

    let (best_policy, best_cost) = match best {
        Some((index, cost)) => (grid[index], cost),
        None => (incumbent, base_cost),
    };
    let gain = base_cost.mean - best_cost.mean;
    let significant = gain > base_cost.half_width_95 + best_cost.half_width_95;
    Ok(DeviationReport {
        deviator: entity,
        base_cost,
        best_policy,
        best_cost,
        gain,
        significant,
    })
}

/// Per-replicate data shared by every candidate evaluation.
struct Workset {
    estimator: EstimatorSpec,
    total_reports: usize,
    dev_slots: usize,
    samples: usize,
    /// x + θ_entity per replicate.
    targets: Vec<f64>,
    /// θ_entity per replicate.
    dev_theta: Vec<f64>,
    /// Deviator measurements, `samples × dev_slots`, row-major.
    dev_z: Vec<f64>,
    /// Deviator jitter shocks, same layout.
    dev_shock: Vec<f64>,
    path: EvalPath,
}

enum EvalPath {
    /// Median, odd report count, single deviator slot: the estimate is the
    /// deviator's report clamped to the two central order statistics of the
    /// other reports.
    MedianClamp { lower: Vec<f64>, upper: Vec<f64> },
    /// Mean: only the sum of the other reports matters.
    MeanShift { other_sums: Vec<f64> },
    /// General case: re-aggregate the full report list per candidate.
    Generic { others: Vec<f64> },
}

impl Workset {
    fn build(
        config: &ScenarioConfig,
        profile: &PolicyProfile,
        estimator: EstimatorSpec,
        entity: usize,
        conditioning: Option<Conditioning>,
        samples: usize,
    ) -> Self {
        let total_reports = config.total_reports();
        let slot_range = config.slot_range(entity);
        let dev_slots = slot_range.len();
        let other_count = total_reports - dev_slots;

        let mut targets = Vec::with_capacity(samples);
        let mut dev_theta = Vec::with_capacity(samples);
        let mut dev_z = Vec::with_capacity(samples * dev_slots);
        let mut dev_shock = Vec::with_capacity(samples * dev_slots);

        let clamp_path =
            estimator == EstimatorSpec::Median && total_reports % 2 == 1 && dev_slots == 1;
        let mean_path = estimator == EstimatorSpec::Mean;

        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut other_sums = Vec::new();
        let mut others_flat = Vec::new();
        if clamp_path {
            lower.reserve(samples);
            upper.reserve(samples);
        } else if mean_path {
            other_sums.reserve(samples);
        } else {
            others_flat.reserve(samples * other_count);
        }

        let cond = conditioning.map(|c| (entity, c));
        let mut others = Vec::with_capacity(other_count);
        for r in 0..samples {
            let world =
                sample_world_conditioned(config, RngStream::new(config.seed, r as u64), cond);
            let reports = build_reports(config, profile, &world);
            targets.push(world.x + world.theta[entity]);
            dev_theta.push(world.theta[entity]);
            for k in slot_range.clone() {
                dev_z.push(world.z[k]);
                dev_shock.push(world.jitter_shock[k]);
            }
            others.clear();
            others.extend_from_slice(&reports[..slot_range.start]);
            others.extend_from_slice(&reports[slot_range.end..]);
            if clamp_path {
                others.sort_by(|a, b| a.total_cmp(b));
                // Odd total with one deviator slot leaves an even count of
                // others; their two central values bracket the median.
                lower.push(others[other_count / 2 - 1]);
                upper.push(others[other_count / 2]);
            } else if mean_path {
                others.sort_by(|a, b| a.total_cmp(b));
                let mut sum = 0.0;
                for &v in &others {
                    sum += v;
                }
                other_sums.push(sum);
            } else {
                others_flat.extend_from_slice(&others);
            }
        }

        let path = if clamp_path {
            EvalPath::MedianClamp { lower, upper }
        } else if mean_path {
            EvalPath::MeanShift { other_sums }
        } else {
            EvalPath::Generic {
                others: others_flat,
            }
        };

        Workset {
            estimator,
            total_reports,
            dev_slots,
            samples,
            targets,
            dev_theta,
            dev_z,
            dev_shock,
            path,
        }
    }

    fn evaluate(&self, policy: &SensorPolicy) -> Result<CostEstimate> {
        let mut acc = RunningMoments::default();
        match &self.path {
            EvalPath::MedianClamp { lower, upper } => {
                for r in 0..self.samples {
                    let y = policy.apply_with_shock(
                        self.dev_z[r],
                        self.dev_theta[r],
                        self.dev_shock[r],
                    );
                    if y.is_nan() {
                        return Err(Error::NanReport { index: 0 });
                    }
                    let lo = lower[r];
                    let hi = upper[r];
                    let estimate = if y < lo {
                        lo
                    } else if y > hi {
                        hi
                    } else {
                        y
                    };
                    acc.push((self.targets[r] - estimate).abs());
                }
            }
            EvalPath::MeanShift { other_sums } => {
                for (r, &others) in other_sums.iter().enumerate() {
                    let mut sum = others;
                    for s in 0..self.dev_slots {
                        let idx = r * self.dev_slots + s;
                        let y = policy.apply_with_shock(
                            self.dev_z[idx],
                            self.dev_theta[r],
                            self.dev_shock[idx],
                        );
                        if y.is_nan() {
                            return Err(Error::NanReport { index: s });
                        }
                        sum += y;
                    }
                    let estimate = sum / self.total_reports as f64;
                    acc.push((self.targets[r] - estimate).abs());
                }
            }
            EvalPath::Generic { others } => {
                let other_count = self.total_reports - self.dev_slots;
                let mut buf = Vec::with_capacity(self.total_reports);
                for r in 0..self.samples {
                    buf.clear();
                    buf.extend_from_slice(&others[r * other_count..(r + 1) * other_count]);
                    for s in 0..self.dev_slots {
                        let idx = r * self.dev_slots + s;
                        buf.push(policy.apply_with_shock(
                            self.dev_z[idx],
                            self.dev_theta[r],
                            self.dev_shock[idx],
                        ));
                    }
                    let estimate = self.estimator.estimate(&buf)?;
                    acc.push((self.targets[r] - estimate).abs());
                }
            }
        }
        Ok(acc.cost_estimate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ex_ante_cost, simulate_round};
    use crate::rng::make_rng;

    fn small_grid() -> Vec<SensorPolicy> {
        let mut grid = alloc::vec![
            SensorPolicy::truthful(),
            SensorPolicy::noisy_equilibrium(),
            SensorPolicy::new(1.0, 2.0, 0.0, 0.0).unwrap(),
            SensorPolicy::new(0.5, 0.0, 1.0, 0.0).unwrap(),
        ];
        grid.push(SensorPolicy::new(1.0, 5.0, 0.0, 0.0).unwrap());
        grid
    }

    #[test]
    fn incumbent_only_grid_has_exactly_zero_gain() {
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.1, 31, 100).unwrap();
        let profile = PolicyProfile::uniform(5, SensorPolicy::noisy_equilibrium());
        let report = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Median,
            0,
            &[SensorPolicy::noisy_equilibrium()],
            500,
        )
        .unwrap();
        assert_eq!(report.gain, 0.0);
        assert!(!report.significant);
        assert_eq!(report.best_policy, SensorPolicy::noisy_equilibrium());
    }

    #[test]
    fn averaging_attack_refutes_truth_telling_under_the_mean() {
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.0, 37, 100).unwrap();
        let profile = PolicyProfile::uniform(5, SensorPolicy::truthful());
        let report = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Mean,
            1,
            &small_grid(),
            2000,
        )
        .unwrap();
        assert_eq!(
            report.best_policy,
            SensorPolicy::averaging_attack(5).unwrap()
        );
        assert!(
            report.best_cost.mean < 1e-12,
            "best cost {}",
            report.best_cost.mean
        );
        assert!(report.gain > 0.0);
        assert!(report.significant);
        // The attack drives the cost to zero, so the gain is the whole base cost.
        assert!((report.gain - report.base_cost.mean).abs() <= 1e-12);
    }

    #[test]
    fn no_deviation_helps_against_noiseless_rejection() {
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.0, 41, 100).unwrap();
        let profile = PolicyProfile::uniform(5, SensorPolicy::truthful());
        let report = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Trimmed { level: 1 },
            2,
            &small_grid(),
            1000,
        )
        .unwrap();
        // Rejection makes the estimate independent of the deviator, so every
        // candidate costs exactly the same and the incumbent keeps the tie.
        assert_eq!(report.gain, 0.0);
        assert!(!report.significant);
        assert_eq!(report.best_policy, SensorPolicy::truthful());
    }

    #[test]
    fn median_clamp_path_matches_the_generic_estimate() {
        let config = ScenarioConfig::symmetric(7, 1.0, 1.0, 0.1, 43, 100).unwrap();
        let profile = PolicyProfile::uniform(7, SensorPolicy::noisy_equilibrium());
        let candidate = SensorPolicy::new(0.75, 1.25, -0.5, 0.5).unwrap();
        let report = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Median,
            3,
            &[candidate],
            400,
        )
        .unwrap();
        // Same candidate costed through the plain per-round path.
        let switched = profile.with_entity(3, candidate).unwrap();
        let direct = ex_ante_cost(&config, &switched, EstimatorSpec::Median, 3, 400).unwrap();
        assert_eq!(report.best_cost.mean.min(report.base_cost.mean), {
            // The candidate may or may not beat the incumbent; compare its
            // own cost, which is best_cost when it wins and must otherwise
            // be recomputed. Easiest: the search stores the candidate cost
            // only when it wins, so compare against whichever of the two
            // matches the direct evaluation.
            direct.mean.min(report.base_cost.mean)
        });
        // Sharper check: candidate cost equals the direct CRN evaluation.
        let solo = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Median,
            3,
            &[candidate],
            400,
        )
        .unwrap();
        if solo.best_policy == candidate {
            assert_eq!(solo.best_cost.mean, direct.mean);
            assert_eq!(solo.best_cost.half_width_95, direct.half_width_95);
        }
    }

    #[test]
    fn pinned_median_makes_every_candidate_equal() {
        // Ten opponents reporting the constant 100 pin the median at 100; the
        // deviator's single report cannot move it, so the gain is exactly zero.
        let config = ScenarioConfig::symmetric(11, 1.0, 1.0, 0.1, 47, 100).unwrap();
        let constant = SensorPolicy::new(0.0, 0.0, 100.0, 0.0).unwrap();
        let profiles = [PolicyProfile::uniform(11, constant)];
        let reports = dominant_strategy_check(
            &config,
            EstimatorSpec::Median,
            &profiles,
            &small_grid(),
            300,
        )
        .unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].gain, 0.0);
        assert!(!reports[0].significant);
        assert_eq!(reports[0].best_policy, SensorPolicy::noisy_equilibrium());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.0, 3, 100).unwrap();
        let profile = PolicyProfile::uniform(5, SensorPolicy::truthful());
        assert!(deviation_gain(&config, &profile, EstimatorSpec::Mean, 0, &[], 100).is_err());
    }

    #[test]
    fn default_grid_contains_the_presets() {
        let grid = default_policy_grid();
        assert_eq!(grid.len(), 7803);
        assert!(grid.contains(&SensorPolicy::truthful()));
        assert!(grid.contains(&SensorPolicy::noisy_equilibrium()));
        assert!(grid.contains(&SensorPolicy::new(1.0, 2.0, 0.0, 0.0).unwrap()));
    }

    #[test]
    fn dominant_strategy_check_requires_the_median() {
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.1, 3, 100).unwrap();
        let profiles = [PolicyProfile::uniform(5, SensorPolicy::truthful())];
        assert!(dominant_strategy_check(
            &config,
            EstimatorSpec::Mean,
            &profiles,
            &small_grid(),
            100
        )
        .is_err());
    }

    #[test]
    fn deviation_worlds_match_simulation_worlds() {
        // The workset must replay the exact worlds that simulate_round sees.
        let config = ScenarioConfig::symmetric(5, 1.0, 1.0, 0.1, 53, 100).unwrap();
        let profile = PolicyProfile::uniform(5, SensorPolicy::noisy_equilibrium());
        let report = deviation_gain(
            &config,
            &profile,
            EstimatorSpec::Median,
            0,
            &[SensorPolicy::noisy_equilibrium()],
            64,
        )
        .unwrap();
        let mut acc_mean = 0.0;
        for r in 0..64 {
            let round =
                simulate_round(&config, &profile, EstimatorSpec::Median, make_rng(53, r)).unwrap();
            acc_mean += (round.world.x + round.world.theta[0] - round.estimate).abs();
        }
        acc_mean /= 64.0;
        assert!((report.base_cost.mean - acc_mean).abs() < 1e-12);
    }
}
