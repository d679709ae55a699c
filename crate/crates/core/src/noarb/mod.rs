//! Arbitrage-free markets and the advantage of re-trading.
//!
//! A market is arbitrage-free when `p_t = β E_t(p_{t+1} + d_{t+1})`. A trader
//! holding `H_{t−1}` who trades `ΔH_t` at `p_{t−1}` ends period `t` with
//!
//! ```text
//! W_t  = p_t·H_t − ΔH_t·p_{t−1} + d_t·H_t
//! W*_t = (p_t + d_t)·H_{t−1}            (had it kept its position)
//! R_t  = W_t − W*_t = (p_t − p_{t−1} + d_t)·ΔH_t
//! ```
//!
//! With `β = 1` and a predictable `ΔH_t`, `E_{t−1} R_t = 0`. The generators
//! here build panels that satisfy the pricing equation exactly, and the
//! Monte Carlo checks verify the zero-advantage and no-trade consequences.

mod montecarlo;
mod panel;
mod strategy;
mod wealth;

pub use montecarlo::{
    jensen_check, path_outcome, test_no_retrade_advantage, AdvantageReport, JensenReport,
    MomentSummary, PathOutcome, Utility, MIN_PATHS,
};
pub use panel::{
    generate_martingale_market, AssetPanel, BinomialModel, Certificate, IidDividendModel,
    MarketGenerator, MarketModel,
};
pub use strategy::{FnStrategy, History, Hold, Momentum, Strategy};
pub use wealth::{wealth_path, WealthPath, IDENTITY_TOLERANCE};

use thiserror::Error;

use crate::dist::DistError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoArbError {
    #[error("invalid market spec: {0}")]
    Spec(&'static str),
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error(
        "wealth identity fails at t = {t}: W − W* = {lhs}, (p_t − p_(t−1) + d_t)·ΔH_t = {rhs}"
    )]
    IdentityViolation { t: usize, lhs: f64, rhs: f64 },
    #[error("need at least {needed} paths, got {got}")]
    TooFewPaths { needed: usize, got: usize },
    #[error("utility parameter {0} does not give a concave increasing utility")]
    BadUtility(f64),
    #[error("wealth {0} is outside the utility's domain")]
    UtilityDomain(f64),
}
