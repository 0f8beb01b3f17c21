//! Command-line front end for `kerrkit`.
//!
//! The binary is a thin wrapper over [`parse_config`] and [`run`]; both are
//! exposed so the argument handling can be tested without a subprocess.

mod config;
mod error;
mod run;

pub use config::{
    parse_config, BcsArgs, Command, Common, FitArgs, FitTarget, GainArgs, MaterialArgs, RunConfig, SimulateArgs,
    SynthArgs, SEED_ENV,
};
pub use error::CliError;
pub use run::run;
