use rayon::prelude::*;
use retrade_core::auction::{
    baseline_population, run_da_session, run_retrade_session, DaConfig, RetradeConfig, SessionOutcome, UnitSource,
    UnitUse,
};
use retrade_core::dist::Dist;
use retrade_core::market::{equilibrium_interval, potential_surplus, surplus_trajectory, TraderPopulation};
use retrade_core::speculative::TrendRule;
use retrade_core::{Money, PriceGrid};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{output, resolve, Common, Run};
use crate::config::{int, Experiment, Overrides};
use crate::error::{CliError, Result};
use crate::output::{num, Output};

#[derive(Debug, clap::Args)]
pub struct DaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Seed of the first session; session `r` uses `seed + r`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub periods: Option<usize>,
    /// Independent sessions to run.
    #[arg(long)]
    pub replications: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct RetradeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub periods: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Cash each agent may spend on units for resale, in ticks.
    #[arg(long)]
    pub cash: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaExperiment {
    pub replications: usize,
    pub population: TraderPopulation,
    pub session: DaConfig,
}

impl Default for DaExperiment {
    fn default() -> Self {
        DaExperiment {
            replications: 1,
            population: baseline_population(),
            session: DaConfig::default(),
        }
    }
}

impl Experiment for DaExperiment {
    fn validate(&self) -> Result<()> {
        check_replications(self.replications)?;
        check_grid(&self.session.grid)?;
        self.session.validate(&self.population).map_err(CliError::usage)
    }

    fn seed(&self) -> Option<u64> {
        Some(self.session.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetradeExperiment {
    pub replications: usize,
    pub population: TraderPopulation,
    pub session: RetradeConfig,
}

/// Two-lag trend followers with per-agent weights drawn from N(1, 0.5).
pub fn default_trend() -> TrendRule {
    TrendRule {
        lags: 2,
        weights: vec![Dist::Normal { mean: 1.0, sd: 0.5 }],
        noise_scale: 0.02,
        redraw: false,
    }
}

impl Default for RetradeExperiment {
    fn default() -> Self {
        RetradeExperiment {
            replications: 1,
            population: baseline_population(),
            session: RetradeConfig {
                base: DaConfig::default(),
                cash_endowment: Money::from_ticks(300),
                expectation_rule: default_trend(),
            },
        }
    }
}

impl Experiment for RetradeExperiment {
    fn validate(&self) -> Result<()> {
        check_replications(self.replications)?;
        check_grid(&self.session.base.grid)?;
        self.session.validate(&self.population).map_err(CliError::usage)
    }

    fn seed(&self) -> Option<u64> {
        Some(self.session.base.seed)
    }
}

fn check_replications(n: usize) -> Result<()> {
    if n == 0 {
        return Err(CliError::Usage("replications must be at least 1".into()));
    }
    Ok(())
}

// deserialization skips the bound check in `PriceGrid::new`
fn check_grid(g: &PriceGrid) -> Result<()> {
    PriceGrid::new(g.min(), g.max()).map(|_| ()).map_err(CliError::usage)
}

/// `session` is the key of the protocol table holding `seed` and `periods`.
fn common_flags(session: &str, seed: Option<u64>, periods: Option<usize>, reps: Option<usize>) -> Result<Overrides> {
    let mut o = Overrides::default();
    o.push_opt(&format!("{session}.seed"), seed.map(int).transpose()?);
    o.push_opt(&format!("{session}.periods"), periods.map(int).transpose()?);
    o.push_opt("replications", reps.map(int).transpose()?);
    Ok(o)
}

/// Per-session statistics shared by both treatments.
struct SessionStats {
    seed: u64,
    contracts: usize,
    violation_fraction: f64,
    final_surplus: Option<i64>,
    last_period_mean: Option<f64>,
    price_variance: f64,
}

fn session_stats(seed: u64, s: &SessionOutcome, pop: &TraderPopulation) -> SessionStats {
    let traj = surplus_trajectory(&s.log, pop).ok();
    SessionStats {
        seed,
        contracts: s.log.len(),
        violation_fraction: traj.as_ref().map_or(0.0, |t| t.violation_fraction),
        final_surplus: traj.as_ref().map(|t| t.last().ticks()),
        last_period_mean: s.last_period_mean(),
        price_variance: s.price_variance(),
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn contracts_table(out: &mut Output, sessions: &[SessionOutcome], pop: &TraderPopulation, retrade: bool) {
    let mut header = vec!["replication", "period", "time", "price", "buyer", "seller", "surplus"];
    if retrade {
        header.extend(["purchase", "sale"]);
    }
    let rows = sessions.iter().enumerate().flat_map(|(r, s)| {
        s.log.entries().iter().enumerate().map(move |(i, c)| {
            let mut row = vec![
                r.to_string(),
                s.periods[i].to_string(),
                c.time.to_string(),
                c.price.ticks().to_string(),
                c.buyer.0.to_string(),
                c.seller.0.to_string(),
                potential_surplus(c.price, pop).ticks().to_string(),
            ];
            if retrade {
                let k = s.kinds[i];
                row.push(
                    match k.purchase {
                        UnitUse::Consumption => "consumption",
                        UnitUse::Inventory => "inventory",
                    }
                    .to_string(),
                );
                row.push(
                    match k.sale {
                        UnitSource::Production => "production",
                        UnitSource::Inventory => "inventory",
                    }
                    .to_string(),
                );
            }
            row
        })
    });
    out.table("contracts.csv", &header, rows);
}

fn sessions_table(out: &mut Output, stats: &[SessionStats]) {
    out.table(
        "sessions.csv",
        &[
            "replication",
            "seed",
            "contracts",
            "violation_fraction",
            "final_surplus",
            "last_period_mean",
            "price_variance",
        ],
        stats.iter().enumerate().map(|(r, s)| {
            [
                r.to_string(),
                s.seed.to_string(),
                s.contracts.to_string(),
                num(s.violation_fraction),
                s.final_surplus.map(|v| v.to_string()).unwrap_or_default(),
                opt_num(s.last_period_mean),
                num(s.price_variance),
            ]
        }),
    );
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

pub fn run_da(command: &'static str, args: &DaArgs) -> Result<Run> {
    let o = common_flags("session", args.seed, args.periods, args.replications)?;
    let r = resolve::<DaExperiment>(&args.common, o)?;
    let cfg = &r.config;
    let pop = &cfg.population;
    let seeds: Vec<u64> = (0..cfg.replications as u64)
        .map(|i| cfg.session.seed.wrapping_add(i))
        .collect();
    let sessions = seeds
        .par_iter()
        .map(|&seed| {
            let c = DaConfig {
                seed,
                ..cfg.session.clone()
            };
            run_da_session(&c, pop)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::data)?;
    let stats: Vec<SessionStats> = seeds
        .iter()
        .zip(&sessions)
        .map(|(&s, o)| session_stats(s, o, pop))
        .collect();

    let eq = equilibrium_interval(pop, &cfg.session.grid).map_err(CliError::usage)?;
    let min_v = potential_surplus(eq.low, pop).ticks();
    let mean_violation = mean(stats.iter().map(|s| s.violation_fraction));
    let worst_final = stats.iter().filter_map(|s| s.final_surplus).max();
    let no_trade = stats.iter().filter(|s| s.contracts == 0).count();

    let mut out = output(command, &r);
    contracts_table(&mut out, &sessions, pop, false);
    sessions_table(&mut out, &stats);
    out.result("equilibrium", json!({ "low": eq.low.ticks(), "high": eq.high.ticks() }));
    out.result("min_surplus", min_v);
    out.result("sessions", stats.len());
    out.result("sessions_without_contracts", no_trade);
    out.result("mean_violation_fraction", mean_violation);
    out.result("worst_final_surplus", worst_final);
    out.result(
        "mean_last_period_price",
        mean(stats.iter().filter_map(|s| s.last_period_mean)),
    );
    let near = worst_final.is_some_and(|w| w as f64 <= 1.1 * min_v as f64) && no_trade == 0;
    out.check(
        mean_violation <= 0.05 && near,
        format!(
            "mean violation fraction {mean_violation:.4} (limit 0.05), worst final V {} against min V {min_v} (limit +10%)",
            worst_final.map_or_else(|| "n/a".to_string(), |w| w.to_string())
        ),
    );
    Ok(Run {
        output: out,
        lines: vec![
            format!("equilibrium interval [{}, {}], min V = {min_v}", eq.low, eq.high),
            format!("{} sessions, mean violation fraction {mean_violation:.4}", stats.len()),
        ],
    })
}

pub fn run_retrade(command: &'static str, args: &RetradeArgs) -> Result<Run> {
    let mut o = common_flags("session.base", args.seed, args.periods, args.replications)?;
    o.push_opt("session.cash_endowment", args.cash.map(int).transpose()?);
    let r = resolve::<RetradeExperiment>(&args.common, o)?;
    let cfg = &r.config;
    let pop = &cfg.population;
    let seeds: Vec<u64> = (0..cfg.replications as u64)
        .map(|i| cfg.session.base.seed.wrapping_add(i))
        .collect();
    let sessions = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.session.clone();
            c.base.seed = seed;
            run_retrade_session(&c, pop)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::data)?;
    let stats: Vec<SessionStats> = seeds
        .iter()
        .zip(&sessions)
        .map(|(&s, o)| session_stats(s, o, pop))
        .collect();

    let endowment = cfg.session.cash_endowment;
    let balanced = sessions.iter().all(|s| s.ledger.balanced());
    let within_budget = sessions.iter().all(|s| {
        s.accounts
            .iter()
            .all(|a| a.cash >= Money::ZERO && a.spent <= endowment + a.proceeds)
    });
    let inventory_trades: usize = sessions
        .iter()
        .map(|s| {
            s.kinds
                .iter()
                .filter(|k| k.purchase == UnitUse::Inventory || k.sale == UnitSource::Inventory)
                .count()
        })
        .sum();
    let mean_var = mean(stats.iter().map(|s| s.price_variance));

    let mut out = output(command, &r);
    contracts_table(&mut out, &sessions, pop, true);
    sessions_table(&mut out, &stats);
    out.table(
        "accounts.csv",
        &["replication", "agent", "role", "cash", "spent", "proceeds"],
        sessions.iter().enumerate().flat_map(|(rep, s)| {
            s.accounts.iter().enumerate().map(move |(i, a)| {
                [
                    rep.to_string(),
                    i.to_string(),
                    if i < s.buyers { "buyer" } else { "seller" }.to_string(),
                    a.cash.ticks().to_string(),
                    a.spent.ticks().to_string(),
                    a.proceeds.ticks().to_string(),
                ]
            })
        }),
    );
    out.result("sessions", stats.len());
    out.result("mean_price_variance", mean_var);
    out.result(
        "mean_last_period_price",
        mean(stats.iter().filter_map(|s| s.last_period_mean)),
    );
    out.result("contracts_involving_inventory", inventory_trades);
    out.result("ledgers", sessions.iter().map(|s| s.ledger).collect::<Vec<_>>());
    out.result("ledgers_balanced", balanced);
    out.result("budgets_respected", within_budget);
    out.check(
        balanced && within_budget,
        format!("unit ledgers balanced: {balanced}, cash budgets respected: {within_budget}"),
    );
    Ok(Run {
        output: out,
        lines: vec![format!(
            "{} sessions, mean contract-price variance {mean_var:.2}, {inventory_trades} contracts involving inventory",
            stats.len()
        )],
    })
}
