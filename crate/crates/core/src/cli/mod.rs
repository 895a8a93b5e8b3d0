//! Command-line front end: `spectrum`, `run <scenario>`, `list-presets`.
//!
//! Exit status: 0 on success, 2 for unparsable input or an unknown
//! scenario/preset, 3 when the propagator's norm check fails, 1 otherwise.

pub mod config;
pub mod presets;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Scenario, ScenarioConfig};

use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "he-qubit",
    version,
    about = "Population-passage gates for electrons on liquid helium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the bound-state problem and write energies and dipole elements.
    Spectrum(CommonArgs),
    /// Run a scenario and write its CSV time series and JSON report.
    Run {
        /// spectrum, rabi, scrap-single, scrap-two, nonadiabatic-single,
        /// nonadiabatic-two or bell.
        scenario: String,
        #[command(flatten)]
        common: CommonArgs,
        /// Built-in configuration (see `list-presets`).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Override the time step, ns.
        #[arg(long)]
        dt: Option<f64>,
        /// Run once per value of a config key, in parallel: KEY=V1,V2,...
        #[arg(long, value_name = "KEY=V1,V2,...")]
        sweep: Option<String>,
    },
    /// Print the built-in presets.
    ListPresets,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Usage(_) => 2,
        Error::Accuracy { .. } => 3,
        _ => 1,
    }
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve(
    scenario: Scenario,
    common: &CommonArgs,
    preset: Option<&str>,
    dt: Option<f64>,
) -> Result<ScenarioConfig> {
    let mut cfg = match (&common.config, preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => presets::preset(name)?,
        (None, None) => presets::default_for(scenario),
    };
    if cfg.scenario != scenario {
        return Err(Error::Usage(format!(
            "configuration is for scenario '{}', not '{scenario}'",
            cfg.scenario
        )));
    }
    if let Some(dt) = dt {
        cfg.numerics.dt = dt;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Execute a parsed command, writing human-readable output to `out`.
pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let (scenario, common, preset, dt, sweep) = match cli.command {
        Command::ListPresets => {
            write!(out, "{}", presets::list_presets())?;
            return Ok(());
        }
        Command::Spectrum(common) => (Scenario::Spectrum, common, None, None, None),
        Command::Run {
            scenario,
            common,
            preset,
            dt,
            sweep,
        } => (scenario.parse::<Scenario>()?, common, preset, dt, sweep),
    };
    let cfg = resolve(scenario, &common, preset.as_deref(), dt)?;
    let configs = match &sweep {
        Some(spec) => {
            let (key, values) = run::parse_sweep(spec)?;
            run::expand_sweep(&cfg, &key, &values)?
        }
        None => vec![cfg],
    };
    if common.dump_config {
        for c in &configs {
            write!(out, "{}", c.to_toml()?)?;
        }
        return Ok(());
    }
    let mut first_err = None;
    for result in run::execute_all(&configs, &common.out_dir) {
        match result {
            Ok(o) => writeln!(out, "{}", o.summary)?,
            Err(e) => {
                writeln!(out, "error: {e}")?;
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

/// Entry point used by the binary. Returns the process exit status.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    match dispatch(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
