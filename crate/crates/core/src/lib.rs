//! Game-theoretic participatory sensing.
//!
//! A receiver estimates a scalar state from reports submitted by strategic
//! sensors. Each sensor carries a private bias and wants the estimate pulled
//! toward its own target, so the receiver's choice of aggregation rule —
//! averaging, rejection averaging (trimmed mean), or median — decides whether
//! truthful reporting survives as an equilibrium. This crate provides:
//!
//! - the domain model: scenarios, world draws, reproducible random streams
//!   ([`scenario`], [`rng`]);
//! - the receiver's estimators and the rejection-level/median equivalence
//!   ([`estimators`]);
//! - the sensors' affine reporting rules, including the named attack and
//!   equilibrium presets ([`policies`]);
//! - cost evaluation, best-response search on common random numbers, and
//!   exact noiseless equilibrium checks ([`game`]);
//! - coalition variants of the invariance checks ([`coalitions`]);
//! - the error-versus-population experiments ([`experiments`]).
//!
//! The crate is `no_std` + `alloc`; all IO, file formats, and the CLI live in
//! the companion `sensim-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coalitions;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod game;
pub mod policies;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use estimators::{
    mean_estimate, median_estimate, trim_level_for_median, trimmed_estimate, EstimatorSpec,
};
pub use game::{
    default_policy_grid, deviation_gain, dominant_strategy_check, estimator_error, ex_ante_cost,
    ex_post_cost, ex_post_deviation_gain, noiseless_truth_equilibrium_check, paired_gain,
    simulate_round, CostEstimate, DeviationReport, ExactCheckReport, PairedGain, RoundSample,
    Witness,
};
pub use policies::{apply_policy, PolicyProfile, SensorPolicy};
pub use rng::{make_rng, NormalSampler, RngStream};
pub use scenario::{
    sample_world, sample_world_conditioned, Conditioning, ScenarioConfig, WorldDraw,
};
