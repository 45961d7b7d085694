//! `sensim` — participatory-sensing estimator game simulator.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sensim_core::{
    coalitions, deviation_gain, estimator_error, ex_ante_cost, experiments,
    noiseless_truth_equilibrium_check, EstimatorSpec, SensorPolicy,
};

use config::{load_grid, load_scenario, parse_estimator};
use output::{render_curves_svg, write_curves_csv};

/// Exit codes: 0 success/claim holds, 2 claim refuted, 64 usage error,
/// 74 I/O error.
pub const EXIT_OK: u8 = 0;
pub const EXIT_REFUTED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<sensim_core::Error> for CliError {
    fn from(err: sensim_core::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "sensim",
    about = "Strategic participatory sensing: robust estimators vs. strategic sensors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo cost evaluation for a scenario: the receiver's estimation
    /// error, or one sensor's ex ante cost when --entity is given.
    Simulate(SimulateArgs),
    /// Equilibrium and coalition checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Error-vs-population curves for mean and median at the reporting
    /// equilibrium; writes CSV and optionally an SVG plot.
    Figure1(CurveArgs),
    /// Median-error decay along an increasing population list.
    Consistency(CurveArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// mean | trimmed:<level> | median
    #[arg(long)]
    estimator: String,
    /// Replicates; defaults to the scenario's `samples`.
    #[arg(long)]
    samples: Option<usize>,
    /// Evaluate this entity's ex ante cost instead of the receiver's error.
    #[arg(long)]
    entity: Option<usize>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Check whether the scenario's profile is an equilibrium: exactly in the
    /// noiseless truthful case, by grid best-response search otherwise.
    /// Exit code 0 when not refuted, 2 when refuted.
    Equilibrium(EquilibriumArgs),
    /// Exact coalition invariance check for every deviating entity.
    Coalition(CoalitionArgs),
}

#[derive(Args)]
struct EquilibriumArgs {
    #[arg(long)]
    config: PathBuf,
    /// mean | trimmed:<level> | median
    #[arg(long)]
    estimator: String,
    /// `default` or a JSON file with a policy grid.
    #[arg(long, default_value = "default")]
    grid: String,
}

#[derive(Args)]
struct CoalitionArgs {
    #[arg(long)]
    config: PathBuf,
    /// mean | trimmed:<level> | median
    #[arg(long)]
    estimator: String,
}

#[derive(Args)]
struct CurveArgs {
    /// Comma-separated odd report counts, ascending (e.g. 11,21,31).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Monte Carlo replicates per point.
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination.
    #[arg(long)]
    csv: PathBuf,
    /// Optional SVG destination.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not usage errors.
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{err}");
            return ExitCode::from(EXIT_OK);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Check(CheckCommand::Equilibrium(args)) => check_equilibrium(args),
        Command::Check(CheckCommand::Coalition(args)) => check_coalition(args),
        Command::Figure1(args) => curves(args, true),
        Command::Consistency(args) => curves(args, false),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Io(format!("serializing output: {err}")))?;
    // A closed pipe (e.g. piping into `head`) ends the program quietly
    // instead of panicking.
    if let Err(err) = writeln!(std::io::stdout(), "{text}") {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(CliError::Io(format!("writing output: {err}")));
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let estimator = parse_estimator(&args.estimator)?;
    let scenario = load_scenario(&args.config, estimator)?;
    let samples = args.samples.unwrap_or(scenario.config.samples);
    let cost = match args.entity {
        Some(entity) => ex_ante_cost(
            &scenario.config,
            &scenario.profile,
            estimator,
            entity,
            samples,
        )?,
        None => estimator_error(&scenario.config, &scenario.profile, estimator, samples)?,
    };
    print_json(&cost)?;
    Ok(EXIT_OK)
}

/// Default adversarial report values for the exact checks; the check itself
/// adds the infinities.
const ADVERSARIAL_VALUES: [f64; 5] = [0.0, 1.0, -1.0, 1e9, -1e9];

#[derive(serde::Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum EquilibriumOutput {
    Exact {
        holds: bool,
        report: sensim_core::ExactCheckReport,
    },
    Search {
        refuted: bool,
        reports: Vec<sensim_core::DeviationReport>,
    },
}

fn check_equilibrium(args: EquilibriumArgs) -> Result<u8, CliError> {
    let estimator = parse_estimator(&args.estimator)?;
    let scenario = load_scenario(&args.config, estimator)?;
    let config = &scenario.config;
    let profile = &scenario.profile;

    let truthful = profile
        .policies
        .iter()
        .all(|p| *p == SensorPolicy::truthful());
    let exact_applicable = config.var_w == 0.0
        && truthful
        && match estimator {
            EstimatorSpec::Trimmed { level } => level >= 1 && config.total_reports() > 2 * level,
            EstimatorSpec::Median => config.total_reports() >= 3,
            EstimatorSpec::Mean => false,
        };

    if exact_applicable {
        let report = noiseless_truth_equilibrium_check(config, estimator, &ADVERSARIAL_VALUES)?;
        let holds = report.holds;
        print_json(&EquilibriumOutput::Exact { holds, report })?;
        return Ok(if holds { EXIT_OK } else { EXIT_REFUTED });
    }

    let grid = load_grid(&args.grid, config, estimator)?;
    let mut reports = Vec::with_capacity(config.n_sensors);
    for entity in 0..config.n_sensors {
        reports.push(deviation_gain(
            config,
            profile,
            estimator,
            entity,
            &grid,
            config.samples,
        )?);
    }
    let refuted = reports.iter().any(|r| r.significant && r.gain > 0.0);
    print_json(&EquilibriumOutput::Search { refuted, reports })?;
    Ok(if refuted { EXIT_REFUTED } else { EXIT_OK })
}

#[derive(serde::Serialize)]
struct CoalitionOutput {
    /// Whether the coalition sizes satisfy the estimator's robustness
    /// condition (rejection level covering the largest coalition, or no
    /// majority coalition for the median).
    conditions_hold: bool,
    holds: bool,
    per_deviator: Vec<sensim_core::ExactCheckReport>,
}

fn check_coalition(args: CoalitionArgs) -> Result<u8, CliError> {
    let estimator = parse_estimator(&args.estimator)?;
    let scenario = load_scenario(&args.config, estimator)?;
    let config = &scenario.config;
    let coalition = coalitions::CoalitionScenario::new(config.clone())?;
    if config.var_w != 0.0 {
        return Err(CliError::Usage(
            "the coalition check applies to the noiseless regime (var_w = 0)".into(),
        ));
    }

    let sizes = &config.coalition_sizes;
    let conditions_hold = match estimator {
        EstimatorSpec::Mean => {
            return Err(CliError::Usage(
                "averaging never rejects a report; check trimmed:<level> or median".into(),
            ));
        }
        EstimatorSpec::Trimmed { level } => {
            let max_size = *sizes.iter().max().expect("validated nonempty");
            level >= max_size && level <= (config.total_reports() - 1) / 2
        }
        EstimatorSpec::Median => coalitions::median_majority_condition(sizes),
    };

    // The probe runs with or without the robustness condition, so a majority
    // coalition produces an observable witness instead of a usage error.
    let mut per_deviator = Vec::with_capacity(config.n_sensors);
    for (deviator, &size) in sizes.iter().enumerate() {
        let tuples = coalitions::adversarial_tuples(&coalitions::ADVERSARIAL_VALUES, size);
        per_deviator.push(coalitions::coalition_invariance_probe(
            &coalition, estimator, deviator, &tuples,
        )?);
    }
    let holds = per_deviator.iter().all(|r| r.holds);
    print_json(&CoalitionOutput {
        conditions_hold,
        holds,
        per_deviator,
    })?;
    Ok(if holds { EXIT_OK } else { EXIT_REFUTED })
}

fn curves(args: CurveArgs, with_mean: bool) -> Result<u8, CliError> {
    let points = if with_mean {
        experiments::figure1_experiment(&args.n, args.samples, args.seed)?
    } else {
        experiments::consistency_experiment(&args.n, args.samples, args.seed)?
    };
    write_curves_csv(&points, args.seed, &args.csv)
        .map_err(|err| CliError::Io(format!("writing {}: {err}", args.csv.display())))?;
    if let Some(svg_path) = &args.svg {
        let svg = render_curves_svg(&points)?;
        std::fs::write(svg_path, svg)
            .map_err(|err| CliError::Io(format!("writing {}: {err}", svg_path.display())))?;
    }
    Ok(EXIT_OK)
}
