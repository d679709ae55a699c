use retrade_core::market::{
    equilibrium_interval, max_extractable_surplus, potential_surplus, surplus_slope, TraderPopulation,
};
use retrade_core::{Money, PriceGrid};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{output, resolve, Common, Run};
use crate::config::{int, Experiment, Overrides};
use crate::error::{CliError, Result};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: Common,
    /// Buyer values in ticks, one per unit.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<i64>>,
    /// Seller costs in ticks, one per unit.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub costs: Option<Vec<i64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_max: Option<i64>,
}

/// A population on an integer price grid. The grid defaults to
/// `[min(0, lowest reservation), highest reservation]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumConfig {
    pub values: Vec<i64>,
    pub costs: Vec<i64>,
    pub grid_min: Option<i64>,
    pub grid_max: Option<i64>,
}

impl EquilibriumConfig {
    pub fn population(&self) -> TraderPopulation {
        TraderPopulation::from_ticks(&self.values, &self.costs)
    }

    pub fn grid(&self) -> Result<PriceGrid> {
        let all = self.values.iter().chain(&self.costs);
        let lo = self.grid_min.unwrap_or_else(|| all.clone().copied().min().unwrap_or(0).min(0));
        let hi = self.grid_max.unwrap_or_else(|| all.copied().max().unwrap_or(0));
        PriceGrid::new(Money::from_ticks(lo), Money::from_ticks(hi)).map_err(CliError::usage)
    }
}

impl Experiment for EquilibriumConfig {
    fn validate(&self) -> Result<()> {
        if self.values.is_empty() && self.costs.is_empty() {
            return Err(CliError::Usage("population is empty: give values and/or costs".into()));
        }
        self.grid().map(|_| ())
    }

    fn seed(&self) -> Option<u64> {
        None
    }
}

/// Grid prices minimising the potential surplus, by scanning every price.
pub fn brute_force(pop: &TraderPopulation, grid: &PriceGrid) -> (Money, Money, Money) {
    let mut best = None::<(Money, Money, Money)>;
    for p in grid.iter() {
        let v = potential_surplus(p, pop);
        best = match best {
            Some((bv, lo, _)) if v == bv => Some((bv, lo, p)),
            Some((bv, ..)) if v > bv => best,
            _ => Some((v, p, p)),
        };
    }
    best.expect("grid is non-empty")
}

pub fn run(command: &'static str, args: &Args) -> Result<Run> {
    let mut o = Overrides::default();
    if let Some(v) = &args.values {
        o.push("values", toml::Value::Array(v.iter().map(|&x| x.into()).collect()));
    }
    if let Some(c) = &args.costs {
        o.push("costs", toml::Value::Array(c.iter().map(|&x| x.into()).collect()));
    }
    o.push_opt("grid_min", args.grid_min.map(int).transpose()?);
    o.push_opt("grid_max", args.grid_max.map(int).transpose()?);
    let r = resolve::<EquilibriumConfig>(&args.common, o)?;
    let pop = r.config.population();
    let grid = r.config.grid()?;
    let eq = equilibrium_interval(&pop, &grid).map_err(CliError::usage)?;
    let v = potential_surplus(eq.low, &pop);

    let mut out = output(command, &r);
    out.table(
        "surplus.csv",
        &["price", "surplus", "slope"],
        grid.iter().map(|p| {
            [
                p.ticks().to_string(),
                potential_surplus(p, &pop).ticks().to_string(),
                surplus_slope(p, &pop).to_string(),
            ]
        }),
    );
    out.result("interval", json!({ "low": eq.low.ticks(), "high": eq.high.ticks() }));
    out.result("min_surplus", v.ticks());
    out.result("midpoint", eq.midpoint().ticks());
    out.result("max_extractable_surplus", max_extractable_surplus(&pop).ticks());
    out.result("grid", json!({ "min": grid.min().ticks(), "max": grid.max().ticks() }));
    let (bv, lo, hi) = brute_force(&pop, &grid);
    out.check(
        (bv, lo, hi) == (v, eq.low, eq.high),
        format!("grid scan gives [{lo}, {hi}] with V = {bv}"),
    );
    Ok(Run {
        output: out,
        lines: vec![format!("interval [{}, {}]", eq.low, eq.high), format!("V = {v}")],
    })
}
