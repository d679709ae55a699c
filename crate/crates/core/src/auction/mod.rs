//! Continuous double auction sessions.
//!
//! Each step one randomly chosen agent acts: it accepts the standing quote on
//! the other side if its own quote crosses it, and otherwise posts a quote
//! (under the improvement rule only if it beats the standing one). A contract
//! executes at the standing quote and clears the book. Quotes come from
//! adaptive profit margins that start at a 20% shade and learn from every
//! bid, ask and contract.
//!
//! In a re-trade session every agent may also buy units for resale, with a
//! bid limit of `min(anticipated resale price, cash)`, and sell units it
//! holds at no less than its anticipated resale price. Anticipations follow a
//! [`TrendRule`] on the session's own contract returns.

mod engine;
mod zip;

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{AgentId, TraderPopulation, TransactionLog};
use crate::money::{Money, PriceGrid, TickSize};
use crate::speculative::{SpeculativeError, TrendRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("periods must be at least 1")]
    ZeroPeriods,
    #[error("{steps} steps per period is fewer than the {traders} traders")]
    TooFewSteps { steps: usize, traders: usize },
    #[error("units per trader must be at least 1")]
    ZeroUnits,
    #[error("price grid must start at a positive price, got {0}")]
    NonPositiveGrid(Money),
    #[error("reservation {0} lies outside the price grid")]
    ReservationOutsideGrid(Money),
    #[error("initial margin {0} must lie in [0, 1)")]
    BadMargin(f64),
    #[error("range `{name}` = [{low}, {high}] is invalid")]
    BadRange {
        name: &'static str,
        low: f64,
        high: f64,
    },
    #[error("cash endowment {0} is negative")]
    NegativeCash(Money),
    #[error(transparent)]
    Trend(#[from] SpeculativeError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuctionError {
    #[error("both buyers and sellers are required")]
    NoTraders,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Protocol parameters shared by both treatments.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DaConfig {
    pub periods: usize,
    pub steps_per_period: usize,
    pub tick: TickSize,
    pub grid: PriceGrid,
    pub improvement_rule: bool,
    pub seed: u64,
    /// Units each buyer may consume and each seller may produce per period.
    pub units: u32,
    /// Opening shade of every quote relative to the reservation.
    pub initial_margin: f64,
    /// Range of per-agent concession (learning) rates.
    pub concession_rate: (f64, f64),
    /// Range of per-agent momentum coefficients.
    pub momentum: (f64, f64),
}

impl Default for DaConfig {
    fn default() -> Self {
        DaConfig {
            periods: 20,
            steps_per_period: 120,
            tick: TickSize::default(),
            grid: PriceGrid::new(Money::from_ticks(1), Money::from_ticks(1000))
                .expect("ordered bounds"),
            improvement_rule: true,
            seed: 0,
            units: 1,
            initial_margin: 0.2,
            concession_rate: (0.1, 0.5),
            momentum: (0.0, 0.1),
        }
    }
}

impl DaConfig {
    pub fn validate(&self, pop: &TraderPopulation) -> Result<(), AuctionError> {
        if pop.values.is_empty() || pop.costs.is_empty() {
            return Err(AuctionError::NoTraders);
        }
        if self.periods == 0 {
            return Err(ConfigError::ZeroPeriods.into());
        }
        let traders = pop.values.len() + pop.costs.len();
        if self.steps_per_period < traders {
            return Err(ConfigError::TooFewSteps {
                steps: self.steps_per_period,
                traders,
            }
            .into());
        }
        if self.units == 0 {
            return Err(ConfigError::ZeroUnits.into());
        }
        if !self.grid.min().is_positive() {
            return Err(ConfigError::NonPositiveGrid(self.grid.min()).into());
        }
        if let Some(&r) = pop
            .values
            .iter()
            .chain(&pop.costs)
            .find(|r| !self.grid.contains(**r))
        {
            return Err(ConfigError::ReservationOutsideGrid(r).into());
        }
        if !(0.0..1.0).contains(&self.initial_margin) {
            return Err(ConfigError::BadMargin(self.initial_margin).into());
        }
        check_range("concession_rate", self.concession_rate, 1.0)?;
        check_range("momentum", self.momentum, 1.0)?;
        Ok(())
    }
}

fn check_range(name: &'static str, (low, high): (f64, f64), max: f64) -> Result<(), ConfigError> {
    if low.is_finite() && high.is_finite() && 0.0 <= low && low <= high && high <= max {
        Ok(())
    } else {
        Err(ConfigError::BadRange { name, low, high })
    }
}

/// Re-trade treatment: the base protocol plus speculative buying and
/// reselling.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RetradeConfig {
    pub base: DaConfig,
    /// Cash each agent may spend on units bought for resale.
    pub cash_endowment: Money,
    pub expectation_rule: TrendRule,
}

impl RetradeConfig {
    pub fn validate(&self, pop: &TraderPopulation) -> Result<(), AuctionError> {
        self.base.validate(pop)?;
        if self.cash_endowment < Money::ZERO {
            return Err(ConfigError::NegativeCash(self.cash_endowment).into());
        }
        self.expectation_rule
            .validate()
            .map_err(ConfigError::from)?;
        Ok(())
    }
}

/// Where a purchased unit went.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum UnitUse {
    Consumption,
    Inventory,
}

/// Where a sold unit came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum UnitSource {
    Production,
    Inventory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TradeKind {
    pub purchase: UnitUse,
    pub sale: UnitSource,
}

/// Unit bookkeeping for a session. `held + consumed + expired = endowed`
/// holds after every step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct UnitLedger {
    /// Production units handed to sellers over all periods.
    pub endowed: u64,
    /// Unsold production units still with sellers.
    pub with_sellers: u64,
    /// Units bought for resale and not yet sold.
    pub inventory: u64,
    pub consumed: u64,
    /// Production units unsold at period end plus inventory left at session
    /// end.
    pub expired: u64,
}

impl UnitLedger {
    pub fn held(&self) -> u64 {
        self.with_sellers + self.inventory
    }

    pub fn balanced(&self) -> bool {
        self.held() + self.consumed + self.expired == self.endowed
    }
}

/// Speculative cash flows of one agent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Account {
    pub cash: Money,
    /// Total paid for units bought for resale.
    pub spent: Money,
    /// Total received for units resold.
    pub proceeds: Money,
}

/// Result of one session.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionOutcome {
    pub log: TransactionLog,
    /// Period (from 0) of each contract.
    pub periods: Vec<u32>,
    pub kinds: Vec<TradeKind>,
    pub ledger: UnitLedger,
    /// Indexed by agent: buyers first, then sellers.
    pub accounts: Vec<Account>,
    pub buyers: usize,
}

impl SessionOutcome {
    pub fn prices(&self) -> Vec<f64> {
        self.log.prices().map(|p| p.ticks() as f64).collect()
    }

    /// Mean contract price in the last period with any contracts.
    pub fn last_period_mean(&self) -> Option<f64> {
        let last = *self.periods.last()?;
        let xs: Vec<f64> = self
            .log
            .entries()
            .iter()
            .zip(&self.periods)
            .filter(|(_, &p)| p == last)
            .map(|(c, _)| c.price.ticks() as f64)
            .collect();
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }

    /// Sample variance of all contract prices (zero with fewer than two).
    pub fn price_variance(&self) -> f64 {
        let xs = self.prices();
        if xs.len() < 2 {
            0.0
        } else {
            crate::stats::sample_variance(&xs)
        }
    }

    pub fn is_buyer(&self, id: AgentId) -> bool {
        (id.0 as usize) < self.buyers
    }
}

/// The symmetric six-buyer, six-seller population used as the baseline:
/// values 190, 170, …, 90 and costs 10, 30, …, 110 ticks. Its equilibrium
/// interval is [90, 110].
pub fn baseline_population() -> TraderPopulation {
    TraderPopulation::from_ticks(&[190, 170, 150, 130, 110, 90], &[10, 30, 50, 70, 90, 110])
}

/// Perishable-good session: units are consumed on purchase and unsold units
/// perish at period end.
pub fn run_da_session(
    config: &DaConfig,
    pop: &TraderPopulation,
) -> Result<SessionOutcome, AuctionError> {
    config.validate(pop)?;
    Ok(engine::run(config, pop, None))
}

/// Session in which units may also be bought for resale.
pub fn run_retrade_session(
    config: &RetradeConfig,
    pop: &TraderPopulation,
) -> Result<SessionOutcome, AuctionError> {
    config.validate(pop)?;
    Ok(engine::run(
        &config.base,
        pop,
        Some((config.cash_endowment, &config.expectation_rule)),
    ))
}
