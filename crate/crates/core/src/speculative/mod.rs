//! Speculative return dynamics.
//!
//! Trend-following speculators whose anticipated resale prices extrapolate
//! recent returns produce, to first order, a random-coefficient
//! autoregression
//!
//! ```text
//! r_t = Σ_{h=1..H} α_{h,t} r_{t−h} + ε_t
//! ```
//!
//! (a Kesten process). [`kesten`] simulates it directly, [`oracle`] gives the
//! tail exponent predicted for one lag, [`market`] simulates the agent market
//! it approximates, and [`news`] supplies the regime-switching shocks that
//! make volatility cluster.

pub mod kesten;
pub mod market;
pub mod news;
pub mod oracle;

pub use kesten::{simulate_kesten, KestenError, KestenParams, KestenRun, KestenWarning};
pub use market::{
    simulate_speculative_market, simulate_with_news, MarketOptions, SpeculativeError,
    SpeculativeRun, TrendRule,
};
pub use news::{generate_news, NewsError, NewsPath, NewsProcess, Regime};
pub use oracle::{calibrate_scale, tail_exponent_oracle, OracleError};
