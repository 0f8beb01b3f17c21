//! Command-line and config-file parsing.
//!
//! Every subcommand has one settings struct that is both a clap argument
//! group and a serde record. Flags and the optional TOML file are each
//! turned into a key-value table, the flag table is laid over the file
//! table, and the result is deserialized back into the struct. The seed
//! falls back to `KERRKIT_SEED`, then to [`kerrkit::synth::DEFAULT_SEED`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kerrkit::report::OutputFormat;
use kerrkit::SweepDirection;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SEED_ENV: &str = "KERRKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "kerrkit", version, about = "Kinetic-inductance resonator modeling and fitting")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Noise-free transmission trace at one drive power.
    Simulate(SimulateArgs),
    /// Fit one or more measured traces or point tables.
    Fit(FitArgs),
    /// Four-wave-mixing forward gain over a (ξ, δ) grid.
    Gain(GainArgs),
    /// Qi(T) and f0(T)/f0(0) from the Mattis-Bardeen model.
    Bcs(BcsArgs),
    /// Universal Tc(R□) relation fitted to a film table.
    Material(MaterialArgs),
    /// Noisy synthetic traces over a power ladder.
    Synth(SynthArgs),
}

/// Options that only make sense on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML file with default values for this subcommand's options.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    /// Internal quality factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qi: Option<f64>,
    /// Magnitude of the complex external quality factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qe: Option<f64>,
    /// Impedance-mismatch angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Self-Kerr shift K/2π per photon, kHz.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kerr_khz: Option<f64>,
    /// Incident power at the device plane.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<f64>,
    /// Half-span of the sweep in linewidths [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    /// Number of frequency points [default: 801].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Branch selection in the bistable region [default: up].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<SweepDirection>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qe: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kerr_khz: Option<f64>,
    /// Comma-separated power ladder in dBm.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<Vec<f64>>,
    /// Signal-to-noise ratio of the additive noise [default: no noise].
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<SweepDirection>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Directory receiving `trace_00.csv`, `trace_01.csv`, ...
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FitTarget {
    Linear,
    Nonlinear,
    KerrShift,
    Temperature,
    Tls,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitArgs {
    /// Input file; repeat for a power ladder (lowest power first).
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<PathBuf>>,
    /// What to fit [default: linear for one trace, nonlinear for several].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<FitTarget>,
    /// Reference frequency for the Kerr-shift and temperature fits.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    /// Calibration uncertainty of the incident power, propagated into K.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_sigma_dbm: Option<f64>,
    /// Fit f0, κ and φ jointly with the nonlinear ladder.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_linear: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qe: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kerr_khz: Option<f64>,
    /// Comma-separated reduced pump strengths.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    /// Signal offset from the pump, kHz.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_khz: Option<f64>,
    /// Pump detuning range in linewidths [default: -2].
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    /// [default: 301]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<SweepDirection>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcsArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tc_k: Option<f64>,
    /// Kinetic inductance fraction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Temperature-independent Qi ceiling.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_i_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_ghz: Option<f64>,
    /// [default: 0.1·Tc]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min_k: Option<f64>,
    /// [default: 0.6·Tc]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_k: Option<f64>,
    /// [default: 30]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialArgs {
    /// Film table with columns `thickness_nm,tc_k,rho_n_ohm_m`.
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone)]
pub enum Command {
    Simulate(SimulateArgs),
    Fit(FitArgs),
    Gain(GainArgs),
    Bcs(BcsArgs),
    Material(MaterialArgs),
    Synth(SynthArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Gain(_) => "gain",
            Command::Bcs(_) => "bcs",
            Command::Material(_) => "material",
            Command::Synth(_) => "synth",
        }
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input_paths: Vec<PathBuf>,
    pub output_path: Option<PathBuf>,
    /// The merged named settings, as seen by the subcommand.
    pub settings: toml::Table,
    pub seed: u64,
    pub force: bool,
}

/// Parses `argv` (program name first). `env_seed` is the value of
/// `KERRKIT_SEED`, passed in so callers and tests control the environment.
pub fn parse_config<I, T>(argv: I, env_seed: Option<&str>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        Sub::Simulate(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Simulate(merged), settings, common, env_seed)
        }
        Sub::Fit(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Fit(merged), settings, common, env_seed)
        }
        Sub::Gain(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Gain(merged), settings, common, env_seed)
        }
        Sub::Bcs(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Bcs(merged), settings, common, env_seed)
        }
        Sub::Material(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Material(merged), settings, common, env_seed)
        }
        Sub::Synth(a) => {
            let common = a.common.clone();
            let (merged, settings) = resolve(&a, &common)?;
            finish(Command::Synth(merged), settings, common, env_seed)
        }
    }
}

fn read_config_file(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
        path: path.to_path_buf(),
        message: format!("cannot read: {e}"),
    })?;
    text.parse::<toml::Table>().map_err(|e| CliError::ConfigFile {
        path: path.to_path_buf(),
        message: e.message().to_owned(),
    })
}

/// Lays the flags over the config file and deserializes the result.
fn resolve<T>(flags: &T, common: &Common) -> Result<(T, toml::Table), CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut table = match &common.config {
        Some(path) => {
            let file = read_config_file(path)?;
            // check the file on its own so errors point at the file's keys
            T::deserialize(toml::Value::Table(file.clone())).map_err(|e| CliError::ConfigFile {
                path: path.clone(),
                message: e.to_string(),
            })?;
            file
        }
        None => toml::Table::new(),
    };
    let flag_table = toml::Table::try_from(flags).map_err(|e| CliError::Invalid {
        key: "arguments".into(),
        message: e.to_string(),
    })?;
    table.extend(flag_table);
    let merged = T::deserialize(toml::Value::Table(table.clone())).map_err(|e| CliError::Invalid {
        key: "settings".into(),
        message: e.to_string(),
    })?;
    Ok((merged, table))
}

fn finish(
    command: Command,
    mut settings: toml::Table,
    common: Common,
    env_seed: Option<&str>,
) -> Result<RunConfig, CliError> {
    let seed = match settings.get("seed") {
        Some(v) => v
            .as_integer()
            .and_then(|i| u64::try_from(i).ok())
            .ok_or_else(|| CliError::Invalid {
                key: "seed".into(),
                message: format!("expected an unsigned integer, got {v}"),
            })?,
        None => match env_seed {
            Some(s) => s.trim().parse::<u64>().map_err(|_| CliError::Invalid {
                key: SEED_ENV.into(),
                message: format!("expected an unsigned integer, got `{s}`"),
            })?,
            None => kerrkit::synth::DEFAULT_SEED,
        },
    };
    if let Ok(v) = i64::try_from(seed) {
        settings.insert("seed".into(), toml::Value::Integer(v));
    }
    let (input_paths, output_path) = match &command {
        Command::Simulate(a) => (Vec::new(), a.output.clone()),
        Command::Fit(a) => (a.input.clone().unwrap_or_default(), a.output.clone()),
        Command::Gain(a) => (Vec::new(), a.output.clone()),
        Command::Bcs(a) => (Vec::new(), a.output.clone()),
        Command::Material(a) => (a.input.iter().cloned().collect(), a.output.clone()),
        Command::Synth(a) => (Vec::new(), a.output.clone()),
    };
    match &command {
        Command::Fit(_) | Command::Material(_) if input_paths.is_empty() => return Err(CliError::Missing("--input")),
        _ => {}
    }
    for p in &input_paths {
        if !p.exists() {
            return Err(CliError::Invalid {
                key: "--input".into(),
                message: format!("{} does not exist", p.display()),
            });
        }
    }
    Ok(RunConfig {
        command,
        input_paths,
        output_path,
        settings,
        seed,
        force: common.force,
    })
}
