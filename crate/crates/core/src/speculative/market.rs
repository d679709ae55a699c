//! Agent market of trend-following speculators.
//!
//! Each step every agent anticipates the resale price
//! `p_{t−1} · (1 + Σ_h a_{i,h} r_{t−h} + news_t + noise_{i,t})`, optionally
//! capped by its cash, and the market price is the minimiser of the
//! speculative surplus over those anticipations: their median (the midpoint of
//! the two middle values for an even number of agents).

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::news::{generate_news, NewsError, NewsPath, NewsProcess};
use crate::dist::{Dist, DistError};
use crate::market::median_bounds;
use crate::rng::{self, SimRng, MAIN_STREAM};
use crate::series::{ReturnSeries, RETURN_FLOOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpeculativeError {
    #[error("at least one agent is required")]
    NoAgents,
    #[error("trend rule needs at least one lag")]
    NoLags,
    #[error("expected 1 or {expected} weight distributions, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("expectation noise scale {0} must be non-negative")]
    BadNoise(f64),
    #[error("initial price {0} must be positive")]
    BadInitialPrice(f64),
    #[error("cash cap {0} must be positive")]
    BadCap(f64),
    #[error("expected {expected} news shocks, got {got}")]
    NewsLength { expected: usize, got: usize },
    #[error("price path degenerated to {price} at step {step}")]
    DegeneratePrice { step: usize, price: f64 },
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    News(#[from] NewsError),
}

/// How speculators extrapolate recent returns.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TrendRule {
    pub lags: usize,
    /// Distribution of each agent's weight on each lag (one per lag, or one
    /// shared by all lags).
    pub weights: Vec<Dist>,
    /// Scale of each agent's idiosyncratic Gaussian expectation noise.
    pub noise_scale: f64,
    /// Redraw every agent's weights each step instead of fixing them for the
    /// whole run.
    pub redraw: bool,
}

impl TrendRule {
    /// Every agent puts the same fixed weights on its lags, with no noise.
    pub fn fixed(weights: &[f64]) -> Self {
        TrendRule {
            lags: weights.len(),
            weights: weights
                .iter()
                .map(|&value| Dist::Degenerate { value })
                .collect(),
            noise_scale: 0.0,
            redraw: false,
        }
    }

    pub fn validate(&self) -> Result<(), SpeculativeError> {
        if self.lags == 0 {
            return Err(SpeculativeError::NoLags);
        }
        if self.weights.len() != 1 && self.weights.len() != self.lags {
            return Err(SpeculativeError::WeightCount {
                expected: self.lags,
                got: self.weights.len(),
            });
        }
        for w in &self.weights {
            w.validate()?;
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(SpeculativeError::BadNoise(self.noise_scale));
        }
        Ok(())
    }

    pub fn weight(&self, lag: usize) -> &Dist {
        if self.weights.len() == 1 {
            &self.weights[0]
        } else {
            &self.weights[lag]
        }
    }

    pub fn burn_in(&self) -> usize {
        10 * self.lags
    }

    /// Draws one agent's lag weights.
    pub fn draw_weights<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.lags).map(|h| self.weight(h).sample(rng)).collect()
    }

    /// `Σ_h weights[h] · r_{t−1−h}` over the available history (newest last).
    pub fn extrapolate(&self, weights: &[f64], history: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (h, w) in weights.iter().enumerate() {
            if h < history.len() {
                acc += w * history[history.len() - 1 - h];
            }
        }
        acc
    }

    /// Expectation noise draw; consumes nothing when the noise is off.
    pub fn noise<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.noise_scale == 0.0 {
            0.0
        } else {
            let z: f64 = StandardNormal.sample(rng);
            self.noise_scale * z
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct MarketOptions {
    pub initial_price: f64,
    /// Upper bound on every agent's anticipated resale price.
    pub cash_cap: Option<f64>,
}

impl Default for MarketOptions {
    fn default() -> Self {
        MarketOptions {
            initial_price: 100.0,
            cash_cap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeculativeRun {
    /// Returns after burn-in, with the price path (`prices[0]` is the price
    /// before the first reported return).
    pub series: ReturnSeries,
    /// News over burn-in and horizon.
    pub news: NewsPath,
}

/// Runs the agent market for `horizon` reported steps after a burn-in of
/// `10 · lags` steps.
pub fn simulate_speculative_market(
    rule: &TrendRule,
    news: &NewsProcess,
    n_agents: usize,
    horizon: usize,
    seed: u64,
    options: MarketOptions,
) -> Result<SpeculativeRun, SpeculativeError> {
    rule.validate()?;
    let path = generate_news(news, rule.burn_in() + horizon, seed)?;
    let series = simulate_with_news(rule, &path.shocks, n_agents, horizon, seed, options)?;
    Ok(SpeculativeRun { series, news: path })
}

/// Same market driven by a given news-shock stream of length
/// `burn_in + horizon`.
pub fn simulate_with_news(
    rule: &TrendRule,
    news_shocks: &[f64],
    n_agents: usize,
    horizon: usize,
    seed: u64,
    options: MarketOptions,
) -> Result<ReturnSeries, SpeculativeError> {
    rule.validate()?;
    if n_agents == 0 {
        return Err(SpeculativeError::NoAgents);
    }
    if !(options.initial_price > 0.0 && options.initial_price.is_finite()) {
        return Err(SpeculativeError::BadInitialPrice(options.initial_price));
    }
    if let Some(cap) = options.cash_cap {
        if !(cap > 0.0) {
            return Err(SpeculativeError::BadCap(cap));
        }
    }
    let burn_in = rule.burn_in();
    let total = burn_in + horizon;
    if news_shocks.len() != total {
        return Err(SpeculativeError::NewsLength {
            expected: total,
            got: news_shocks.len(),
        });
    }

    let mut rng: SimRng = rng::stream(seed, MAIN_STREAM);
    let mut weights: Vec<Vec<f64>> = (0..n_agents).map(|_| rule.draw_weights(&mut rng)).collect();
    let mut expected = vec![0.0; n_agents];
    let mut returns = Vec::with_capacity(total);
    let mut prices = Vec::with_capacity(horizon + 1);
    let mut truncations = 0;
    let mut price = options.initial_price;

    for (t, &news) in news_shocks.iter().enumerate() {
        if t == burn_in {
            prices.push(price);
        }
        if rule.redraw && t > 0 {
            for w in weights.iter_mut() {
                *w = rule.draw_weights(&mut rng);
            }
        }
        for (slot, w) in expected.iter_mut().zip(&weights) {
            let mut rho = rule.extrapolate(w, &returns);
            rho += news;
            rho += rule.noise(&mut rng);
            if let Some(cap) = options.cash_cap {
                rho = rho.min(cap / price - 1.0);
            }
            *slot = rho;
        }
        let (lo, hi) = median_bounds(&mut expected, f64::total_cmp);
        let mut r = if lo == hi { lo } else { 0.5 * (lo + hi) };
        if 1.0 + r <= 0.0 {
            r = RETURN_FLOOR;
            if t >= burn_in {
                truncations += 1;
            }
        }
        price *= 1.0 + r;
        if !(price > 0.0 && price.is_finite()) {
            return Err(SpeculativeError::DegeneratePrice { step: t, price });
        }
        returns.push(r);
        if t >= burn_in {
            prices.push(price);
        }
    }
    let returns = returns.split_off(burn_in);
    Ok(ReturnSeries {
        returns,
        prices: Some(prices),
        truncations,
    })
}
