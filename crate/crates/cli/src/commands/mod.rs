pub mod analyze;
pub mod auction;
pub mod equilibrium;
pub mod noarb;
pub mod speculative;

use std::path::PathBuf;

use crate::config::{self, Experiment, Overrides, Resolved};
use crate::error::Result;
use crate::output::Output;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// TOML config file; missing keys take their defaults.
    #[arg(long, short = 'c', value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one config value, e.g. `--set session.periods=30`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory [default: $RETRADE_OUT/<command> or retrade-out/<command>].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when the run's check fails.
    #[arg(long)]
    pub assert: bool,
}

/// A finished run: files to write and lines for standard output.
pub struct Run {
    pub output: Output,
    pub lines: Vec<String>,
}

/// Resolves a config from `--config`, then `--set`, then the named flags.
pub fn resolve<T: Experiment>(common: &Common, flags: Overrides) -> Result<Resolved<T>> {
    let mut all = Overrides::default();
    for s in &common.set {
        all.push_assignment(s)?;
    }
    all.extend(flags);
    config::resolve(common.config.as_deref(), &all)
}

pub fn output<T: Experiment>(command: &'static str, r: &Resolved<T>) -> Output {
    Output::new(command, r.text.clone(), r.hash.clone(), r.config.seed())
}
