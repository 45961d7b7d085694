//! Exact noiseless equilibrium checks.
//!
//! In the noiseless regime every non-deviating report equals the state x, so
//! whether the estimate can move off x depends only on how many adversarial
//! reports land on each side of it — not on their magnitudes. A sweep over a
//! small probe set plus the infinities therefore covers all policies.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{ExactCheckReport, Witness};
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::scenario::ScenarioConfig;

/// States the deterministic checks probe, including a value with no short
/// binary representation.
pub const PROBE_STATES: [f64; 6] = [0.0, 1.0, -1.0, 10.0, -10.0, 3.7];

/// Deterministically verifies that a lone deviating report slot cannot move
/// the estimate when every other slot reports the state exactly. Each
/// adversarial value (the infinities are always included) is tried in every
/// slot at every probe state; the first violation is returned as a witness.
pub fn noiseless_truth_equilibrium_check(
    config: &ScenarioConfig,
    estimator: EstimatorSpec,
    adversarial_values: &[f64],
) -> Result<ExactCheckReport> {
    config.validate()?;
    if config.var_w != 0.0 {
        return Err(Error::InvalidArgument(
            "the exact check applies to the noiseless regime (var_w = 0)".into(),
        ));
    }
    let c = config.total_reports();
    match estimator {
        EstimatorSpec::Mean => {
            return Err(Error::InvalidArgument(
                "averaging never rejects a report; the invariance claim needs a rejection \
                 level of at least 1 or the median"
                    .into(),
            ));
        }
        EstimatorSpec::Trimmed { level } => {
            if level == 0 {
                return Err(Error::InvalidArgument(
                    "rejection level 0 keeps every report; the invariance claim needs level >= 1"
                        .into(),
                ));
            }
            if c < 2 * level + 1 {
                return Err(Error::TrimLevelTooHigh { reports: c, level });
            }
        }
        EstimatorSpec::Median => {
            if c < 3 {
                return Err(Error::InvalidArgument(
                    "median invariance needs at least 3 reports".into(),
                ));
            }
        }
    }

    let mut values = adversarial_values.to_vec();
    for inf in [f64::INFINITY, f64::NEG_INFINITY] {
        if !values.contains(&inf) {
            values.push(inf);
        }
    }
    let tuples: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();

    for slot in 0..c {
        if let Some(witness) =
            invariance_probe(c, slot..slot + 1, estimator, &tuples, &PROBE_STATES)?
        {
            return Ok(ExactCheckReport {
                holds: false,
                witness: Some(witness),
            });
        }
    }
    Ok(ExactCheckReport {
        holds: true,
        witness: None,
    })
}

/// Report-level sweep shared with the coalition checks: all slots carry the
/// probe state except the deviator's, which take the adversarial tuple.
/// Returns the first violation found.
pub(crate) fn invariance_probe(
    total_reports: usize,
    deviator_slots: Range<usize>,
    estimator: EstimatorSpec,
    adversarial_tuples: &[Vec<f64>],
    probe_states: &[f64],
) -> Result<Option<Witness>> {
    let mut reports = vec![0.0; total_reports];
    for &x in probe_states {
        for tuple in adversarial_tuples {
            if tuple.len() != deviator_slots.len() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "adversarial tuple has {} values for {} deviator slots",
                    tuple.len(),
                    deviator_slots.len()
                )));
            }
            reports.fill(x);
            for (slot, &value) in deviator_slots.clone().zip(tuple.iter()) {
                reports[slot] = value;
            }
            let estimate = estimator.estimate(&reports)?;
            if estimate != x {
                return Ok(Some(Witness {
                    reports: reports.clone(),
                    estimate,
                    expected: x,
                }));
            }
        }
    }
    Ok(None)
}
