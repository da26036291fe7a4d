//! Command-line front end: configuration, dispatch and CSV/JSON output.
//!
//! Every command writes `<out>/<file>.csv` with a fixed header and a
//! `<out>/<command>.json` sidecar holding the schema version, the command,
//! the seed and the fully resolved parameters. Feeding the sidecar's `spec`
//! object back through `--config` reproduces the run.

mod commands;
mod error;
mod spec;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{
    execute, Command, Report, EQUILIBRIA_HEADER, ESCAPE_HEADER, INVADE_HEADER, PORTRAIT_HEADER,
    SCHEMA_VERSION, SUMMARY_HEADER, TRAJECTORY_HEADER,
};
pub use error::CliError;
pub use spec::{apply_override, Profile, RunSpec, Sweep, SweepRun};

#[derive(Debug, Clone, Parser)]
#[command(name = "polariscope", version, about = "Identity, risk and polarization: analysis and simulation")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON object of parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one parameter; repeatable, applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "POLARISCOPE_THREADS")]
    pub threads: Option<usize>,
}

/// Resolve the configuration and run the command on a dedicated thread pool.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut spec = RunSpec::load(cli.config.as_deref(), &cli.set)?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    log::info!("running {} with seed {}", cli.command.name(), spec.seed);
    pool.install(|| execute(cli.command, &spec, &cli.out))
}
