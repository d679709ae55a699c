use rayon::prelude::*;
use retrade_core::noarb::{
    path_outcome, AdvantageReport, BinomialModel, History, Hold, JensenReport, MarketGenerator, MarketModel,
    Momentum, PathOutcome, Strategy, Utility, IDENTITY_TOLERANCE, MIN_PATHS,
};
use serde::{Deserialize, Serialize};

use super::{output, resolve, Common, Run};
use crate::config::{int, Experiment, Overrides};
use crate::error::{CliError, Result};
use crate::output::num;

#[derive(Debug, clap::Args)]
pub struct NoarbArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated market paths.
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub assets: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct JensenArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub assets: Option<usize>,
    /// Use power utility with this relative risk aversion.
    #[arg(long)]
    pub gamma: Option<f64>,
}

/// Trading rules selectable from a config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StrategySpec {
    Hold { initial: f64 },
    Momentum { initial: f64, size: f64 },
}

impl Strategy for StrategySpec {
    fn initial_holdings(&self, n_assets: usize) -> Vec<f64> {
        match *self {
            StrategySpec::Hold { initial } => Hold { initial }.initial_holdings(n_assets),
            StrategySpec::Momentum { initial, size } => Momentum { initial, size }.initial_holdings(n_assets),
        }
    }

    fn trade(&mut self, history: &History<'_>, trade: &mut [f64]) {
        match *self {
            StrategySpec::Hold { initial } => Hold { initial }.trade(history, trade),
            StrategySpec::Momentum { initial, size } => Momentum { initial, size }.trade(history, trade),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoarbExperiment {
    pub paths: usize,
    pub assets: usize,
    pub seed: u64,
    pub market: MarketModel,
    pub strategy: StrategySpec,
}

impl Default for NoarbExperiment {
    fn default() -> Self {
        NoarbExperiment {
            paths: 100_000,
            assets: 1,
            seed: 0,
            market: MarketModel::Binomial(BinomialModel::default()),
            strategy: StrategySpec::Momentum {
                initial: 1.0,
                size: 1.0,
            },
        }
    }
}

impl NoarbExperiment {
    fn check(&self) -> Result<()> {
        self.market.validate().map_err(CliError::usage)?;
        if self.paths < MIN_PATHS {
            return Err(CliError::Usage(format!("need at least {MIN_PATHS} paths, got {}", self.paths)));
        }
        if self.assets == 0 {
            return Err(CliError::Usage("assets must be at least 1".into()));
        }
        Ok(())
    }

    /// Runs every path in parallel, in path order.
    pub fn outcomes(&self) -> Result<(MarketGenerator, Vec<PathOutcome>)> {
        let gen = MarketGenerator::new(self.market).map_err(CliError::usage)?;
        let outcomes = (0..self.paths as u64)
            .into_par_iter()
            .map(|i| path_outcome(&gen, self.assets, &self.strategy, self.seed, i))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::data)?;
        Ok((gen, outcomes))
    }
}

impl Experiment for NoarbExperiment {
    fn validate(&self) -> Result<()> {
        self.check()
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenExperiment {
    pub utility: Utility,
    #[serde(flatten)]
    pub run: NoarbExperiment,
}

impl Default for JensenExperiment {
    fn default() -> Self {
        JensenExperiment {
            utility: Utility::Power { gamma: 2.0 },
            run: NoarbExperiment::default(),
        }
    }
}

impl Experiment for JensenExperiment {
    fn validate(&self) -> Result<()> {
        self.utility.validate().map_err(CliError::usage)?;
        self.run.check()
    }

    fn seed(&self) -> Option<u64> {
        Some(self.run.seed)
    }
}

fn flags(seed: Option<u64>, paths: Option<usize>, assets: Option<usize>) -> Result<Overrides> {
    let mut o = Overrides::default();
    o.push_opt("seed", seed.map(int).transpose()?);
    o.push_opt("paths", paths.map(int).transpose()?);
    o.push_opt("assets", assets.map(int).transpose()?);
    Ok(o)
}

pub fn run_noarb(command: &'static str, args: &NoarbArgs) -> Result<Run> {
    let r = resolve::<NoarbExperiment>(&args.common, flags(args.seed, args.paths, args.assets)?)?;
    let (gen, outcomes) = r.config.outcomes()?;
    let rep = AdvantageReport::from_outcomes(&outcomes);
    let audit = gen.certificate().audit();

    let mut out = output(command, &r);
    out.table(
        "advantage.csv",
        &["t", "mean", "stderr", "z"],
        rep.per_t
            .iter()
            .enumerate()
            .map(|(i, s)| [(i + 1).to_string(), num(s.mean), num(s.stderr), num(s.z)]),
    );
    out.result("report", &rep);
    out.result("certificate_failures", audit);
    out.result("identity_tolerance", IDENTITY_TOLERANCE);
    let identity_ok = rep.max_identity_error <= IDENTITY_TOLERANCE;
    out.check(
        rep.pass && identity_ok && audit == 0,
        format!(
            "pooled z {:.3}, max per-period |z| {:.3} (limit 3), identity error {:e}, certificate failures {audit}",
            rep.pooled.z,
            rep.per_t.iter().map(|s| s.z.abs()).fold(0.0, f64::max),
            rep.max_identity_error
        ),
    );
    Ok(Run {
        output: out,
        lines: vec![format!(
            "{} paths: pooled advantage {:.6} ± {:.6} (z = {:.3})",
            rep.n_paths, rep.pooled.mean, rep.pooled.stderr, rep.pooled.z
        )],
    })
}

pub fn run_jensen(command: &'static str, args: &JensenArgs) -> Result<Run> {
    let mut o = flags(args.seed, args.paths, args.assets)?;
    if let Some(g) = args.gamma {
        o.push("utility.family", "power");
        o.push("utility.gamma", g);
    }
    let r = resolve::<JensenExperiment>(&args.common, o)?;
    let (_, outcomes) = r.config.run.outcomes()?;
    let rep = JensenReport::from_outcomes(&r.config.utility, &outcomes).map_err(CliError::data)?;

    let mut out = output(command, &r);
    out.table(
        "utility.csv",
        &["series", "mean", "stderr", "z"],
        [("trading", rep.trading), ("holding", rep.holding), ("difference", rep.difference)]
            .into_iter()
            .map(|(name, s)| [name.to_string(), num(s.mean), num(s.stderr), num(s.z)]),
    );
    out.result("report", &rep);
    let linear = r.config.utility == Utility::Linear;
    let identity_ok = rep.max_identity_error <= IDENTITY_TOLERANCE;
    let passed = rep.pass && identity_ok && (!linear || rep.zero_within_ci);
    out.check(
        passed,
        format!(
            "E u(W) - E u(W*) = {:.4e} ± {:.4e}{}",
            rep.difference.mean,
            rep.difference.stderr,
            if linear { " (must be zero within 3 se)" } else { " (must not exceed 3 se)" }
        ),
    );
    Ok(Run {
        output: out,
        lines: vec![format!(
            "{} paths: E u(W) - E u(W*) = {:.4e} ± {:.4e}",
            rep.n_paths, rep.difference.mean, rep.difference.stderr
        )],
    })
}
