//! Error-versus-population experiments at the noisy reporting equilibrium.
//!
//! Every sensor reports y = z + θ; the receiver's error E|x - x̂| is measured
//! for the mean and median estimators on identical report streams, so the
//! comparison between the two curves is not confounded by sampling noise.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::game::{estimator_error, CostEstimate};
use crate::policies::{PolicyProfile, SensorPolicy};
use crate::scenario::ScenarioConfig;

/// Default prior variances for the experiments.
pub const DEFAULT_VAR_X: f64 = 1.0;
pub const DEFAULT_VAR_THETA: f64 = 1.0;
pub const DEFAULT_VAR_W: f64 = 0.1;

/// One point of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CurvePoint {
    /// Report count.
    pub n: usize,
    pub estimator: EstimatorSpec,
    pub error: CostEstimate,
}

fn validate_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument(
            "the list of report counts is empty".into(),
        ));
    }
    for &n in n_list {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "report counts must be odd and at least 3, got {n}; reduce an even panel to \
                 odd by dropping one report"
            )));
        }
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "report counts must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Mean- and median-estimator error curves at the reporting equilibrium,
/// paired on identical report streams, with the default variances.
pub fn figure1_experiment(n_list: &[usize], samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    figure1_experiment_with(
        n_list,
        samples,
        seed,
        DEFAULT_VAR_X,
        DEFAULT_VAR_THETA,
        DEFAULT_VAR_W,
    )
}

/// As [`figure1_experiment`] with explicit variances.
pub fn figure1_experiment_with(
    n_list: &[usize],
    samples: usize,
    seed: u64,
    var_x: f64,
    var_theta: f64,
    var_w: f64,
) -> Result<Vec<CurvePoint>> {
    run_curves(
        n_list,
        samples,
        seed,
        var_x,
        var_theta,
        var_w,
        &[EstimatorSpec::Mean, EstimatorSpec::Median],
    )
}

/// Median-estimator error along an increasing list of report counts; the
/// errors shrink toward zero as the population grows.
pub fn consistency_experiment(
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    consistency_experiment_with(
        n_list,
        samples,
        seed,
        DEFAULT_VAR_X,
        DEFAULT_VAR_THETA,
        DEFAULT_VAR_W,
    )
}

/// As [`consistency_experiment`] with explicit variances.
pub fn consistency_experiment_with(
    n_list: &[usize],
    samples: usize,
    seed: u64,
    var_x: f64,
    var_theta: f64,
    var_w: f64,
) -> Result<Vec<CurvePoint>> {
    run_curves(
        n_list,
        samples,
        seed,
        var_x,
        var_theta,
        var_w,
        &[EstimatorSpec::Median],
    )
}

fn run_curves(
    n_list: &[usize],
    samples: usize,
    seed: u64,
    var_x: f64,
    var_theta: f64,
    var_w: f64,
    estimators: &[EstimatorSpec],
) -> Result<Vec<CurvePoint>> {
    validate_n_list(n_list)?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let mut points = Vec::with_capacity(n_list.len() * estimators.len());
    for &n in n_list {
        let config = ScenarioConfig::symmetric(n, var_x, var_theta, var_w, seed, samples)?;
        let profile = PolicyProfile::uniform(n, SensorPolicy::noisy_equilibrium());
        for &estimator in estimators {
            let error = estimator_error(&config, &profile, estimator, samples)?;
            points.push(CurvePoint {
                n,
                estimator,
                error,
            });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_counts_are_rejected_with_the_reduction_hint() {
        let err = figure1_experiment(&[10], 100, 0).unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("odd"), "{msg}");
        assert!(consistency_experiment(&[4], 100, 0).is_err());
        assert!(figure1_experiment(&[1], 100, 0).is_err());
        assert!(figure1_experiment(&[], 100, 0).is_err());
        assert!(figure1_experiment(&[11, 11], 100, 0).is_err());
    }

    #[test]
    fn degenerate_noise_and_bias_give_zero_error() {
        let points = consistency_experiment_with(&[3], 200, 1, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].error.mean, 0.0);
    }

    #[test]
    fn points_come_in_ascending_mean_then_median_order() {
        let points = figure1_experiment(&[3, 5], 50, 2).unwrap();
        let tags: Vec<(usize, &str)> = points.iter().map(|p| (p.n, p.estimator.label())).collect();
        assert_eq!(
            tags,
            alloc::vec![(3, "mean"), (3, "median"), (5, "mean"), (5, "median")]
        );
    }

    #[test]
    fn median_error_exceeds_mean_error_on_shared_draws() {
        let points = figure1_experiment(&[11], 4000, 3).unwrap();
        assert!(points[1].error.mean > points[0].error.mean);
    }
}
