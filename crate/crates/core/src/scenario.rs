//! Scenario configuration and world sampling.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// World model shared by every experiment: strategic-entity count, coalition
/// structure, prior variances, a seed, and the default replicate budget.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScenarioConfig {
    /// Number of strategic entities (lone sensors or coalitions).
    pub n_sensors: usize,
    /// Report slots owned by each entity; all ones for the singleton game.
    pub coalition_sizes: Vec<usize>,
    /// Variance of the state x.
    pub var_x: f64,
    /// Variance of each private bias θ.
    pub var_theta: f64,
    /// Variance of each measurement noise w; zero selects the noiseless regime.
    pub var_w: f64,
    pub seed: u64,
    /// Default Monte Carlo replicate count for cost estimation.
    pub samples: usize,
}

impl ScenarioConfig {
    /// Scenario of `n_sensors` lone sensors (every coalition size is one).
    pub fn symmetric(
        n_sensors: usize,
        var_x: f64,
        var_theta: f64,
        var_w: f64,
        seed: u64,
        samples: usize,
    ) -> Result<Self> {
        Self::with_coalitions(
            alloc::vec![1; n_sensors],
            var_x,
            var_theta,
            var_w,
            seed,
            samples,
        )
    }

    /// Scenario with one entity per coalition size.
    pub fn with_coalitions(
        coalition_sizes: Vec<usize>,
        var_x: f64,
        var_theta: f64,
        var_w: f64,
        seed: u64,
        samples: usize,
    ) -> Result<Self> {
        let config = Self {
            n_sensors: coalition_sizes.len(),
            coalition_sizes,
            var_x,
            var_theta,
            var_w,
            seed,
            samples,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sensors < 2 {
            return Err(Error::InvalidScenario(format!(
                "at least 2 sensors are required, got {}",
                self.n_sensors
            )));
        }
        if self.coalition_sizes.len() != self.n_sensors {
            return Err(Error::InvalidScenario(format!(
                "coalition_sizes has {} entries for {} sensors",
                self.coalition_sizes.len(),
                self.n_sensors
            )));
        }
        if let Some(i) = self.coalition_sizes.iter().position(|&c| c == 0) {
            return Err(Error::InvalidScenario(format!(
                "coalition {i} has size 0; every entity submits at least one report"
            )));
        }
        for (name, value) in [
            ("var_x", self.var_x),
            ("var_theta", self.var_theta),
            ("var_w", self.var_w),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite and nonnegative, got {value}"
                )));
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidScenario("samples must be positive".into()));
        }
        Ok(())
    }

    /// Total report count c = Σ coalition sizes.
    pub fn total_reports(&self) -> usize {
        self.coalition_sizes.iter().sum()
    }

    /// Slot indices owned by `entity` within the report vector.
    pub fn slot_range(&self, entity: usize) -> Range<usize> {
        let start: usize = self.coalition_sizes[..entity].iter().sum();
        start..start + self.coalition_sizes[entity]
    }

    /// Owner entity of each report slot, in slot order.
    pub fn slot_owners(&self) -> Vec<usize> {
        let mut owners = Vec::with_capacity(self.total_reports());
        for (entity, &size) in self.coalition_sizes.iter().enumerate() {
            for _ in 0..size {
                owners.push(entity);
            }
        }
        owners
    }
}

/// One realized draw of the world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldDraw {
    /// The state.
    pub x: f64,
    /// Private bias per entity.
    pub theta: Vec<f64>,
    /// Measurement noise per report slot, stored as the exact residual z - x.
    pub w: Vec<f64>,
    /// Measurement per report slot, z = x + w.
    pub z: Vec<f64>,
    /// Standard-normal shock per report slot. A jittered policy scales this by
    /// its own `jitter_sd`, so competing policies replayed on one draw see
    /// common random numbers.
    pub jitter_shock: Vec<f64>,
}

/// Quantities held fixed when sampling worlds for ex post evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    /// Fix the state and the entity's bias.
    StateAndBias { x: f64, theta: f64 },
    /// Fix the entity's first-slot measurement and its bias; the state is
    /// redrawn from its conditional distribution given that measurement.
    MeasurementAndBias { z: f64, theta: f64 },
}

impl Conditioning {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match *self {
            Conditioning::StateAndBias { x, theta } => (x, theta),
            Conditioning::MeasurementAndBias { z, theta } => (z, theta),
        };
        if a.is_finite() && b.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "conditioning values must be finite, got ({a}, {b})"
            )))
        }
    }
}

/// Draws a world: x ~ N(0, var_x), θ_i ~ N(0, var_theta) i.i.d., w_k ~
/// N(0, var_w) i.i.d., all mutually independent, and z_k = x + w_k.
pub fn sample_world(config: &ScenarioConfig, stream: RngStream) -> WorldDraw {
    sample_world_conditioned(config, stream, None)
}

/// As [`sample_world`], but `Some((entity, conditioning))` pins the given
/// quantities and redraws everything else. The variate layout is identical to
/// the unconditioned draw, so replicate streams line up across ex ante and
/// ex post evaluations.
pub fn sample_world_conditioned(
    config: &ScenarioConfig,
    stream: RngStream,
    conditioning: Option<(usize, Conditioning)>,
) -> WorldDraw {
    let n = config.n_sensors;
    let c = config.total_reports();
    let sd_x = libm::sqrt(config.var_x);
    let sd_theta = libm::sqrt(config.var_theta);
    let sd_w = libm::sqrt(config.var_w);

    let mut g = stream.sampler();
    let xi_x = g.standard_normal();
    let mut theta: Vec<f64> = (0..n).map(|_| sd_theta * g.standard_normal()).collect();
    let w_raw: Vec<f64> = (0..c).map(|_| sd_w * g.standard_normal()).collect();
    let jitter_shock: Vec<f64> = (0..c).map(|_| g.standard_normal()).collect();

    let mut x = sd_x * xi_x;
    let mut pinned_slot: Option<(usize, f64)> = None;
    if let Some((entity, cond)) = conditioning {
        match cond {
            Conditioning::StateAndBias {
                x: x0,
                theta: theta0,
            } => {
                x = x0;
                theta[entity] = theta0;
            }
            Conditioning::MeasurementAndBias {
                z: z0,
                theta: theta0,
            } => {
                let denom = config.var_x + config.var_w;
                let (post_mean, post_sd) = if denom > 0.0 {
                    (
                        z0 * config.var_x / denom,
                        libm::sqrt(config.var_x * config.var_w / denom),
                    )
                } else {
                    (0.0, 0.0)
                };
                x = post_mean + post_sd * xi_x;
                theta[entity] = theta0;
                pinned_slot = Some((config.slot_range(entity).start, z0));
            }
        }
    }

    let mut z = Vec::with_capacity(c);
    let mut w = Vec::with_capacity(c);
    for (k, &wk) in w_raw.iter().enumerate() {
        let zk = match pinned_slot {
            Some((slot, z0)) if slot == k => z0,
            _ => x + wk,
        };
        z.push(zk);
        // Stored as the float residual so z - x - w is exactly zero.
        w.push(zk - x);
    }

    WorldDraw {
        x,
        theta,
        w,
        z,
        jitter_shock,
    }
}
