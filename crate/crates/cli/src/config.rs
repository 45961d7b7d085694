//! Scenario and grid files.
//!
//! A scenario is a flat JSON object with the keys `n_sensors`,
//! `coalition_sizes`, `var_x`, `var_theta`, `var_w`, `seed`, `samples`, plus
//! an optional `policies` list. Each policy is either a literal
//! `{"a": .., "b": .., "d": .., "jitter_sd": ..}` or one of the preset names
//! `"truthful"`, `"averaging_attack"`, `"trimmed_attack"`,
//! `"noisy_equilibrium"`; presets that need the report count or rejection
//! level take them from the scenario and the chosen estimator.

use std::path::Path;

use serde::Deserialize;

use sensim_core::{EstimatorSpec, PolicyProfile, ScenarioConfig, SensorPolicy};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    n_sensors: usize,
    coalition_sizes: Vec<usize>,
    var_x: f64,
    var_theta: f64,
    var_w: f64,
    seed: u64,
    samples: usize,
    #[serde(default)]
    policies: Option<Vec<PolicySpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolicySpec {
    Preset(String),
    Literal {
        a: f64,
        b: f64,
        d: f64,
        jitter_sd: f64,
    },
}

/// A parsed scenario: the core config plus the policy profile to play.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub profile: PolicyProfile,
}

/// Parses `mean`, `trimmed:<level>`, or `median`.
pub fn parse_estimator(text: &str) -> Result<EstimatorSpec, CliError> {
    match text {
        "mean" => Ok(EstimatorSpec::Mean),
        "median" => Ok(EstimatorSpec::Median),
        _ => {
            if let Some(level_text) = text.strip_prefix("trimmed:") {
                let level = level_text.parse::<usize>().map_err(|_| {
                    CliError::Usage(format!(
                        "invalid rejection level {level_text:?}; expected trimmed:<level>"
                    ))
                })?;
                Ok(EstimatorSpec::Trimmed { level })
            } else {
                Err(CliError::Usage(format!(
                    "unknown estimator {text:?}; expected mean, trimmed:<level>, or median"
                )))
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|err| CliError::Io(format!("reading {}: {err}", path.display())))
}

/// Loads and validates a scenario file. The estimator is needed to resolve
/// presets that depend on the rejection level.
pub fn load_scenario(path: &Path, estimator: EstimatorSpec) -> Result<Scenario, CliError> {
    let text = read_file(path)?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|err| CliError::Usage(format!("parsing {}: {err}", path.display())))?;
    if file.coalition_sizes.len() != file.n_sensors {
        return Err(CliError::Usage(format!(
            "{}: coalition_sizes has {} entries for {} sensors",
            path.display(),
            file.coalition_sizes.len(),
            file.n_sensors
        )));
    }
    let config = ScenarioConfig::with_coalitions(
        file.coalition_sizes,
        file.var_x,
        file.var_theta,
        file.var_w,
        file.seed,
        file.samples,
    )?;
    let profile = match file.policies {
        None => PolicyProfile::uniform(config.n_sensors, SensorPolicy::truthful()),
        Some(specs) => {
            if specs.len() != config.n_sensors {
                return Err(CliError::Usage(format!(
                    "{}: policies has {} entries for {} sensors",
                    path.display(),
                    specs.len(),
                    config.n_sensors
                )));
            }
            let mut policies = Vec::with_capacity(specs.len());
            for spec in &specs {
                policies.push(resolve_policy(spec, &config, estimator)?);
            }
            PolicyProfile::new(policies)
        }
    };
    Ok(Scenario { config, profile })
}

fn resolve_policy(
    spec: &PolicySpec,
    config: &ScenarioConfig,
    estimator: EstimatorSpec,
) -> Result<SensorPolicy, CliError> {
    match spec {
        PolicySpec::Literal { a, b, d, jitter_sd } => {
            Ok(SensorPolicy::new(*a, *b, *d, *jitter_sd)?)
        }
        PolicySpec::Preset(name) => {
            let c = config.total_reports();
            match name.as_str() {
                "truthful" => Ok(SensorPolicy::truthful()),
                "noisy_equilibrium" => Ok(SensorPolicy::noisy_equilibrium()),
                "averaging_attack" => Ok(SensorPolicy::averaging_attack(c)?),
                "trimmed_attack" => match estimator {
                    EstimatorSpec::Trimmed { level } => Ok(SensorPolicy::trimmed_attack(c, level)?),
                    _ => Err(CliError::Usage(
                        "the trimmed_attack preset needs --estimator trimmed:<level>".into(),
                    )),
                },
                other => Err(CliError::Usage(format!(
                    "unknown policy preset {other:?}; expected truthful, averaging_attack, \
                     trimmed_attack, or noisy_equilibrium"
                ))),
            }
        }
    }
}

/// Loads a deviation grid: `default` for the built-in affine grid, otherwise
/// a JSON array of policy specs.
pub fn load_grid(
    source: &str,
    config: &ScenarioConfig,
    estimator: EstimatorSpec,
) -> Result<Vec<SensorPolicy>, CliError> {
    if source == "default" {
        return Ok(sensim_core::default_policy_grid());
    }
    let path = Path::new(source);
    let text = read_file(path)?;
    let specs: Vec<PolicySpec> = serde_json::from_str(&text)
        .map_err(|err| CliError::Usage(format!("parsing {}: {err}", path.display())))?;
    if specs.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: the policy grid is empty",
            path.display()
        )));
    }
    specs
        .iter()
        .map(|spec| resolve_policy(spec, config, estimator))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_strings_parse() {
        assert_eq!(parse_estimator("mean").unwrap(), EstimatorSpec::Mean);
        assert_eq!(parse_estimator("median").unwrap(), EstimatorSpec::Median);
        assert_eq!(
            parse_estimator("trimmed:3").unwrap(),
            EstimatorSpec::Trimmed { level: 3 }
        );
        assert!(parse_estimator("trimmed:x").is_err());
        assert!(parse_estimator("mode").is_err());
    }

    #[test]
    fn scenario_file_round_trip() {
        let dir = std::env::temp_dir().join("sensim-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("scenario.json");
        std::fs::write(
            &path,
            r#"{
                "n_sensors": 3,
                "coalition_sizes": [1, 1, 1],
                "var_x": 1.0,
                "var_theta": 1.0,
                "var_w": 0.0,
                "seed": 7,
                "samples": 100,
                "policies": ["truthful", {"a": 1.0, "b": 2.0, "d": 0.0, "jitter_sd": 0.0}, "noisy_equilibrium"]
            }"#,
        )
        .unwrap();
        let scenario = load_scenario(&path, EstimatorSpec::Median).unwrap();
        assert_eq!(scenario.config.n_sensors, 3);
        assert_eq!(scenario.profile.policies[0], SensorPolicy::truthful());
        assert_eq!(scenario.profile.policies[1].b, 2.0);
        assert_eq!(
            scenario.profile.policies[2],
            SensorPolicy::noisy_equilibrium()
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = std::env::temp_dir().join("sensim-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(
            &path,
            r#"{"n_sensors": 2, "coalition_sizes": [1,1], "var_x": 1.0, "var_theta": 1.0,
                "var_w": 0.0, "seed": 0, "samples": 10, "extra": 1}"#,
        )
        .unwrap();
        assert!(matches!(
            load_scenario(&path, EstimatorSpec::Mean),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let missing = Path::new("/nonexistent/sensim/scenario.json");
        assert!(matches!(
            load_scenario(missing, EstimatorSpec::Mean),
            Err(CliError::Io(_))
        ));
    }
}
