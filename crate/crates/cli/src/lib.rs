//! Command-line experiments on top of `retrade-core`.
//!
//! Every subcommand resolves a TOML config (defaults, then `--config`, then
//! `--set` and named flags), runs, and writes its tables, the resolved
//! `config.toml` and a `summary.json` into one output directory. Tables are
//! comma-separated with `#` provenance lines on top.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error, 3 failed
//! `--assert` check.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod series_file;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::Common;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "retrade", version, about = "Market price formation and speculative return experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium price interval of a population and its minimum potential surplus.
    Equilibrium(commands::equilibrium::Args),
    /// Double auction sessions for a perishable good.
    SimulateDa(commands::auction::DaArgs),
    /// Double auction sessions in which units may be bought for resale.
    SimulateRetrade(commands::auction::RetradeArgs),
    /// Trend-following speculator market driven by regime-switching news.
    SimulateSpec(commands::speculative::SpecArgs),
    /// Random-coefficient autoregression, optionally calibrated to a tail exponent.
    SimulateKesten(commands::speculative::KestenArgs),
    /// Tail exponent of a series file: Hill, power-law fit and CCDF.
    AnalyzeTails(commands::analyze::TailsArgs),
    /// Autocorrelation of raw and absolute returns of a series file.
    AnalyzeAcf(commands::analyze::AcfArgs),
    /// Monte Carlo test that re-trading earns no expected advantage.
    NoarbCheck(commands::noarb::NoarbArgs),
    /// Expected utility of terminal wealth, trading against holding.
    JensenCheck(commands::noarb::JensenArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Equilibrium(_) => "equilibrium",
            Command::SimulateDa(_) => "simulate-da",
            Command::SimulateRetrade(_) => "simulate-retrade",
            Command::SimulateSpec(_) => "simulate-spec",
            Command::SimulateKesten(_) => "simulate-kesten",
            Command::AnalyzeTails(_) => "analyze-tails",
            Command::AnalyzeAcf(_) => "analyze-acf",
            Command::NoarbCheck(_) => "noarb-check",
            Command::JensenCheck(_) => "jensen-check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Equilibrium(a) => &a.common,
            Command::SimulateDa(a) => &a.common,
            Command::SimulateRetrade(a) => &a.common,
            Command::SimulateSpec(a) => &a.common,
            Command::SimulateKesten(a) => &a.common,
            Command::AnalyzeTails(a) => &a.common,
            Command::AnalyzeAcf(a) => &a.common,
            Command::NoarbCheck(a) => &a.common,
            Command::JensenCheck(a) => &a.common,
        }
    }

    fn execute(&self) -> error::Result<commands::Run> {
        let name = self.name();
        match self {
            Command::Equilibrium(a) => commands::equilibrium::run(name, a),
            Command::SimulateDa(a) => commands::auction::run_da(name, a),
            Command::SimulateRetrade(a) => commands::auction::run_retrade(name, a),
            Command::SimulateSpec(a) => commands::speculative::run_spec(name, a),
            Command::SimulateKesten(a) => commands::speculative::run_kesten(name, a),
            Command::AnalyzeTails(a) => commands::analyze::run_tails(name, a),
            Command::AnalyzeAcf(a) => commands::analyze::run_acf(name, a),
            Command::NoarbCheck(a) => commands::noarb::run_noarb(name, a),
            Command::JensenCheck(a) => commands::noarb::run_jensen(name, a),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> error::Result<()> {
    let common = command.common();
    let run = command.execute()?;
    if common.assert && run.output.check_outcome().is_none() {
        return Err(CliError::Usage(format!(
            "{} has no check to assert with this config",
            command.name()
        )));
    }
    let dir = output::output_dir(common.out.as_deref(), command.name());
    run.output
        .write(&dir)
        .map_err(|e| CliError::Data(format!("cannot write to {}: {e}", dir.display())))?;
    for line in &run.lines {
        let _ = writeln!(out, "{line}");
    }
    if let Some((passed, detail)) = run.output.check_outcome() {
        let _ = writeln!(out, "check: {} ({detail})", if *passed { "pass" } else { "FAIL" });
    }
    let _ = writeln!(out, "output: {}", dir.display());
    match run.output.check_outcome() {
        Some((false, detail)) if common.assert => Err(CliError::Assert(detail.clone())),
        _ => Ok(()),
    }
}
