//! Coalition-aware scenarios and their deterministic truth-telling checks.
//!
//! An entity controlling several report slots models either a coalition of
//! sensors voting on a shared objective or an array of fake sensors run by
//! one hacker; the two readings coincide at the model level. The receiver
//! never learns the coalition sizes.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::game::{invariance_probe, ExactCheckReport, PROBE_STATES};
use crate::scenario::ScenarioConfig;

/// A scenario viewed through its coalition structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionScenario {
    pub base: ScenarioConfig,
    /// Total report count c = Σ coalition sizes.
    pub total_reports: usize,
}

impl CoalitionScenario {
    pub fn new(base: ScenarioConfig) -> Result<Self> {
        base.validate()?;
        let total_reports = base.total_reports();
        Ok(Self {
            base,
            total_reports,
        })
    }
}

/// True iff every entity's slots are outnumbered by everyone else's put
/// together: Σ_{j≠i} c_j ≥ c_i + 1 for all i.
pub fn power_balance_holds(sizes: &[usize]) -> bool {
    let total: usize = sizes.iter().sum();
    sizes.iter().all(|&ci| total - ci > ci)
}

/// True iff no single coalition can pin the median: every entity is
/// outnumbered by a margin of at least one when the report total is odd, two
/// when it is even.
pub fn median_majority_condition(sizes: &[usize]) -> bool {
    let total: usize = sizes.iter().sum();
    let threshold = if total % 2 == 1 { 1 } else { 2 };
    sizes.iter().all(|&ci| total - ci >= ci + threshold)
}

/// Adversarial values used by the default coalition sweeps.
pub const ADVERSARIAL_VALUES: [f64; 7] =
    [f64::NEG_INFINITY, -1e6, -1.0, 0.0, 1.0, 1e6, f64::INFINITY];

/// All multisets of `len` values drawn from `values`. The estimators are
/// permutation invariant, so multisets cover every assignment of values to
/// the deviator's slots.
pub fn adversarial_tuples(values: &[f64], len: usize) -> Vec<Vec<f64>> {
    let mut tuples = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn extend(
        values: &[f64],
        len: usize,
        from: usize,
        current: &mut Vec<f64>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for i in from..values.len() {
            current.push(values[i]);
            extend(values, len, i, current, out);
            current.pop();
        }
    }
    extend(values, len, 0, &mut current, &mut tuples);
    tuples
}

/// Deterministically verifies that when every entity except the deviator
/// reports the state truthfully on all its slots, no adversarial tuple on the
/// deviator's slots moves the estimate. Preconditions: noiseless regime, and
/// either a rejection level covering the largest coalition or the median with
/// no majority coalition.
pub fn coalition_invariance_check(
    scenario: &CoalitionScenario,
    estimator: EstimatorSpec,
    deviator: usize,
    adversarial_tuples: &[Vec<f64>],
) -> Result<ExactCheckReport> {
    let config = &scenario.base;
    config.validate()?;
    if scenario.total_reports != config.total_reports() {
        return Err(Error::InvalidScenario(format!(
            "total_reports is {} but the coalition sizes sum to {}",
            scenario.total_reports,
            config.total_reports()
        )));
    }
    if config.var_w != 0.0 {
        return Err(Error::InvalidArgument(
            "the exact coalition check applies to the noiseless regime (var_w = 0)".into(),
        ));
    }
    let c = scenario.total_reports;
    let max_size = *config
        .coalition_sizes
        .iter()
        .max()
        .expect("validated nonempty");
    match estimator {
        EstimatorSpec::Mean => {
            return Err(Error::InvalidArgument(
                "averaging never rejects a report; use a rejection level or the median".into(),
            ));
        }
        EstimatorSpec::Trimmed { level } => {
            let top = (c - 1) / 2;
            if level < max_size || level > top {
                return Err(Error::InvalidArgument(format!(
                    "rejection level {level} must cover the largest coalition and keep a \
                     report: valid range is {max_size}..={top} for sizes {:?}",
                    config.coalition_sizes
                )));
            }
        }
        EstimatorSpec::Median => {
            if !median_majority_condition(&config.coalition_sizes) {
                return Err(Error::InvalidArgument(format!(
                    "a single coalition can pin the median for sizes {:?}",
                    config.coalition_sizes
                )));
            }
        }
    }
    coalition_invariance_probe(scenario, estimator, deviator, adversarial_tuples)
}

/// The same sweep without the equilibrium preconditions. Use it to exhibit
/// counterexamples, e.g. a majority coalition dragging the median.
pub fn coalition_invariance_probe(
    scenario: &CoalitionScenario,
    estimator: EstimatorSpec,
    deviator: usize,
    adversarial_tuples: &[Vec<f64>],
) -> Result<ExactCheckReport> {
    let config = &scenario.base;
    if deviator >= config.n_sensors {
        return Err(Error::InvalidArgument(format!(
            "deviator {deviator} out of range for {} entities",
            config.n_sensors
        )));
    }
    let slots = config.slot_range(deviator);
    match invariance_probe(
        scenario.total_reports,
        slots,
        estimator,
        adversarial_tuples,
        &PROBE_STATES,
    )? {
        Some(witness) => Ok(ExactCheckReport {
            holds: false,
            witness: Some(witness),
        }),
        None => Ok(ExactCheckReport {
            holds: true,
            witness: None,
        }),
    }
}
