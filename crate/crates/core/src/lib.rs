//! Market price formation and speculative return dynamics.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It is organised
//! around six areas:
//!
//! - [`market`]: the potential-surplus function over buyer values and seller
//!   costs, the competitive-equilibrium interval it is minimised on, and the
//!   speculative variant over anticipated resale prices.
//! - [`auction`]: a continuous double auction simulator for perishable goods
//!   and for re-tradable units bought on speculation.
//! - [`speculative`]: random-coefficient autoregressions (Kesten processes),
//!   their tail-exponent oracle, a trend-following agent market and a
//!   regime-switching news process.
//! - [`tails`]: Hill and KS-cutoff power-law estimators, the empirical CCDF and
//!   autocorrelation of raw and absolute returns.
//! - [`noarb`]: martingale market generators, wealth accounting and Monte Carlo
//!   checks that re-trading carries no expected advantage.
//! - [`dist`] / [`quad`] / [`stats`]: shared distribution specs, quadrature and
//!   summary statistics.

#![no_std]

extern crate alloc;

pub mod auction;
pub mod dist;
pub mod market;
pub mod money;
pub mod noarb;
pub mod quad;
pub mod rng;
pub mod series;
pub mod speculative;
pub mod stats;
pub mod tails;

pub use money::{Money, PriceGrid, TickSize};
pub use series::ReturnSeries;

/// Crate version, recorded in output provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
