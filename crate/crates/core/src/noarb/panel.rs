use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::NoArbError;
use crate::dist::Dist;
use crate::rng::{self, SimRng};

/// Price and dividend paths for several assets, rows indexed by `t = 0..=T`.
/// `dividends[0]` is all zeros.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AssetPanel {
    prices: Vec<Vec<f64>>,
    dividends: Vec<Vec<f64>>,
    beta: f64,
}

impl AssetPanel {
    pub fn new(
        prices: Vec<Vec<f64>>,
        dividends: Vec<Vec<f64>>,
        beta: f64,
    ) -> Result<Self, NoArbError> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(NoArbError::Spec("discount factor must lie in (0, 1]"));
        }
        if prices.is_empty() {
            return Err(NoArbError::DimensionMismatch(
                "panel needs at least the initial prices",
            ));
        }
        if dividends.len() != prices.len() {
            return Err(NoArbError::DimensionMismatch(
                "price and dividend rows differ in number",
            ));
        }
        let n = prices[0].len();
        if n == 0 {
            return Err(NoArbError::DimensionMismatch("panel has no assets"));
        }
        if prices.iter().chain(&dividends).any(|row| row.len() != n) {
            return Err(NoArbError::DimensionMismatch("rows differ in asset count"));
        }
        if prices
            .iter()
            .chain(&dividends)
            .flatten()
            .any(|x| !x.is_finite())
        {
            return Err(NoArbError::Spec("prices and dividends must be finite"));
        }
        Ok(AssetPanel {
            prices,
            dividends,
            beta,
        })
    }

    /// Horizon `T`.
    pub fn horizon(&self) -> usize {
        self.prices.len() - 1
    }

    pub fn n_assets(&self) -> usize {
        self.prices[0].len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    pub fn dividends(&self) -> &[Vec<f64>] {
        &self.dividends
    }

    pub fn price(&self, t: usize, asset: usize) -> f64 {
        self.prices[t][asset]
    }

    pub fn dividend(&self, t: usize, asset: usize) -> f64 {
        self.dividends[t][asset]
    }
}

/// Recombining binomial market. A factor `X_t` moves ±1 each period; the
/// asset pays `dividend_up` or `dividend_down` on each move (only on the last
/// move when `terminal_dividend_only`), is worth
/// `terminal_level + terminal_slope · X_T` at `T`, and is priced under
/// up-probability `pricing_up`. Paths are drawn with `sampling_up`; setting it
/// away from `pricing_up` gives a drifting, non-martingale market.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct BinomialModel {
    pub horizon: usize,
    pub beta: f64,
    pub terminal_level: f64,
    pub terminal_slope: f64,
    pub dividend_up: f64,
    pub dividend_down: f64,
    pub terminal_dividend_only: bool,
    pub pricing_up: f64,
    pub sampling_up: f64,
}

impl Default for BinomialModel {
    fn default() -> Self {
        BinomialModel {
            horizon: 20,
            beta: 1.0,
            terminal_level: 100.0,
            terminal_slope: 1.0,
            dividend_up: 0.0,
            dividend_down: 0.0,
            terminal_dividend_only: false,
            pricing_up: 0.5,
            sampling_up: 0.5,
        }
    }
}

/// Dividends drawn i.i.d. from `dividend` each period, with a known terminal
/// value. Prices are deterministic: `p_t = β (p_{t+1} + E d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IidDividendModel {
    pub horizon: usize,
    pub beta: f64,
    pub dividend: Dist,
    pub terminal_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "model", rename_all = "snake_case")
)]
pub enum MarketModel {
    Binomial(BinomialModel),
    IidDividend(IidDividendModel),
}

impl MarketModel {
    pub fn horizon(&self) -> usize {
        match self {
            MarketModel::Binomial(m) => m.horizon,
            MarketModel::IidDividend(m) => m.horizon,
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            MarketModel::Binomial(m) => m.beta,
            MarketModel::IidDividend(m) => m.beta,
        }
    }

    pub fn validate(&self) -> Result<(), NoArbError> {
        let ok_beta = |b: f64| b > 0.0 && b <= 1.0;
        let ok_prob = |p: f64| p > 0.0 && p < 1.0;
        if self.horizon() == 0 {
            return Err(NoArbError::Spec("horizon must be at least 1"));
        }
        if !ok_beta(self.beta()) {
            return Err(NoArbError::Spec("discount factor must lie in (0, 1]"));
        }
        match self {
            MarketModel::Binomial(m) => {
                if !ok_prob(m.pricing_up) || !ok_prob(m.sampling_up) {
                    return Err(NoArbError::Spec("move probabilities must lie in (0, 1)"));
                }
                let vals = [
                    m.terminal_level,
                    m.terminal_slope,
                    m.dividend_up,
                    m.dividend_down,
                ];
                if vals.iter().any(|x| !x.is_finite()) {
                    return Err(NoArbError::Spec("payoff parameters must be finite"));
                }
            }
            MarketModel::IidDividend(m) => {
                m.dividend.validate()?;
                if !m.terminal_value.is_finite() {
                    return Err(NoArbError::Spec("terminal value must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// The conditional expectations a panel was built from.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// `prices[t][j]` is the price after `j` up-moves in `t` periods;
    /// `dividends[t]` is the (up, down) dividend paid on the move into `t`.
    Lattice {
        prices: Vec<Vec<f64>>,
        dividends: Vec<(f64, f64)>,
        pricing_up: f64,
        beta: f64,
    },
    /// Deterministic prices and the mean dividend.
    Deterministic {
        prices: Vec<f64>,
        mean_dividend: f64,
        beta: f64,
    },
}

impl Certificate {
    /// Recomputes `β E[p_{t+1} + d_{t+1} | node]` at every node and counts
    /// the nodes where it differs from the stored price in any bit.
    pub fn audit(&self) -> usize {
        let mut bad = 0;
        match self {
            Certificate::Lattice {
                prices,
                dividends,
                pricing_up,
                beta,
            } => {
                let q = *pricing_up;
                for t in 0..prices.len() - 1 {
                    let (du, dd) = dividends[t + 1];
                    for j in 0..=t {
                        let e =
                            q * (prices[t + 1][j + 1] + du) + (1.0 - q) * (prices[t + 1][j] + dd);
                        if (beta * e).to_bits() != prices[t][j].to_bits() {
                            bad += 1;
                        }
                    }
                }
            }
            Certificate::Deterministic {
                prices,
                mean_dividend,
                beta,
            } => {
                for t in 0..prices.len() - 1 {
                    if (beta * (prices[t + 1] + mean_dividend)).to_bits() != prices[t].to_bits() {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }
}

/// A validated model with its pricing solved, ready to sample panels.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketGenerator {
    model: MarketModel,
    certificate: Certificate,
}

impl MarketGenerator {
    pub fn new(model: MarketModel) -> Result<Self, NoArbError> {
        model.validate()?;
        let certificate = match model {
            MarketModel::Binomial(m) => {
                let t_max = m.horizon;
                let dividends: Vec<(f64, f64)> = (0..=t_max)
                    .map(|t| {
                        if t == 0 || (m.terminal_dividend_only && t < t_max) {
                            (0.0, 0.0)
                        } else {
                            (m.dividend_up, m.dividend_down)
                        }
                    })
                    .collect();
                let mut prices: Vec<Vec<f64>> = (0..=t_max).map(|t| vec![0.0; t + 1]).collect();
                for j in 0..=t_max {
                    let x = 2.0 * j as f64 - t_max as f64;
                    prices[t_max][j] = m.terminal_level + m.terminal_slope * x;
                }
                let q = m.pricing_up;
                for t in (0..t_max).rev() {
                    let (du, dd) = dividends[t + 1];
                    for j in 0..=t {
                        let e =
                            q * (prices[t + 1][j + 1] + du) + (1.0 - q) * (prices[t + 1][j] + dd);
                        prices[t][j] = m.beta * e;
                    }
                }
                Certificate::Lattice {
                    prices,
                    dividends,
                    pricing_up: q,
                    beta: m.beta,
                }
            }
            MarketModel::IidDividend(m) => {
                let mu = m.dividend.mean();
                let mut prices = vec![0.0; m.horizon + 1];
                prices[m.horizon] = m.terminal_value;
                for t in (0..m.horizon).rev() {
                    prices[t] = m.beta * (prices[t + 1] + mu);
                }
                Certificate::Deterministic {
                    prices,
                    mean_dividend: mu,
                    beta: m.beta,
                }
            }
        };
        Ok(MarketGenerator { model, certificate })
    }

    pub fn model(&self) -> &MarketModel {
        &self.model
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// Draws one panel of `n_assets` independent assets.
    pub fn sample<R: Rng + ?Sized>(&self, n_assets: usize, rng: &mut R) -> AssetPanel {
        let t_max = self.model.horizon();
        let mut prices = vec![vec![0.0; n_assets]; t_max + 1];
        let mut dividends = vec![vec![0.0; n_assets]; t_max + 1];
        match (&self.model, &self.certificate) {
            (
                MarketModel::Binomial(m),
                Certificate::Lattice {
                    prices: lattice,
                    dividends: divs,
                    ..
                },
            ) => {
                for a in 0..n_assets {
                    let mut j = 0;
                    prices[0][a] = lattice[0][0];
                    for t in 1..=t_max {
                        let up = rng.random_bool(m.sampling_up);
                        if up {
                            j += 1;
                        }
                        prices[t][a] = lattice[t][j];
                        dividends[t][a] = if up { divs[t].0 } else { divs[t].1 };
                    }
                }
            }
            (MarketModel::IidDividend(m), Certificate::Deterministic { prices: path, .. }) => {
                for t in 0..=t_max {
                    for a in 0..n_assets {
                        prices[t][a] = path[t];
                        if t > 0 {
                            dividends[t][a] = m.dividend.sample(rng);
                        }
                    }
                }
            }
            _ => unreachable!("certificate matches its model"),
        }
        AssetPanel {
            prices,
            dividends,
            beta: self.model.beta(),
        }
    }
}

/// Builds the model's pricing and draws one panel.
pub fn generate_martingale_market(
    model: &MarketModel,
    n_assets: usize,
    seed: u64,
) -> Result<(AssetPanel, Certificate), NoArbError> {
    if n_assets == 0 {
        return Err(NoArbError::DimensionMismatch("panel has no assets"));
    }
    let gen = MarketGenerator::new(*model)?;
    let mut rng: SimRng = rng::stream(seed, rng::MAIN_STREAM);
    let panel = gen.sample(n_assets, &mut rng);
    Ok((panel, gen.certificate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_slope_zero_dividends_is_constant() {
        let model = MarketModel::Binomial(BinomialModel {
            terminal_slope: 0.0,
            ..BinomialModel::default()
        });
        let (panel, cert) = generate_martingale_market(&model, 3, 1).unwrap();
        assert!(panel.prices().iter().flatten().all(|&p| p == 100.0));
        assert_eq!(cert.audit(), 0);
    }

    #[test]
    fn symmetric_terminal_dividend_prices_at_zero() {
        let model = MarketModel::Binomial(BinomialModel {
            horizon: 5,
            terminal_level: 0.0,
            terminal_slope: 0.0,
            dividend_up: 1.0,
            dividend_down: -1.0,
            terminal_dividend_only: true,
            ..BinomialModel::default()
        });
        let (panel, cert) = generate_martingale_market(&model, 1, 4).unwrap();
        assert!(panel.prices().iter().all(|row| row[0] == 0.0));
        assert_eq!(panel.dividend(5, 0).abs(), 1.0);
        assert!(panel.dividends()[..5].iter().all(|row| row[0] == 0.0));
        assert_eq!(cert.audit(), 0);
    }

    #[test]
    fn spec_errors() {
        let bad = MarketModel::Binomial(BinomialModel {
            beta: 0.0,
            ..BinomialModel::default()
        });
        assert!(matches!(
            MarketGenerator::new(bad),
            Err(NoArbError::Spec(_))
        ));
        let bad = MarketModel::Binomial(BinomialModel {
            pricing_up: 1.0,
            ..BinomialModel::default()
        });
        assert!(matches!(
            MarketGenerator::new(bad),
            Err(NoArbError::Spec(_))
        ));
        let bad = MarketModel::IidDividend(IidDividendModel {
            horizon: 3,
            beta: 0.9,
            dividend: Dist::Normal {
                mean: 0.0,
                sd: -1.0,
            },
            terminal_value: 0.0,
        });
        assert!(matches!(
            MarketGenerator::new(bad),
            Err(NoArbError::Distribution(_))
        ));
        assert!(AssetPanel::new(vec![vec![1.0]], vec![], 1.0).is_err());
    }
}
