use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::strategy::{History, Strategy};
use super::{AssetPanel, NoArbError};

/// Relative tolerance of the check `W_t − W*_t = (p_t − p_{t−1} + d_t)·ΔH_t`.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Wealth of a strategy against keeping the previous position, for
/// `t = 0..=T` (`advantage[0] = 0`, `wealth[0] = hold[0] = p_0·H_0`).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct WealthPath {
    pub wealth: Vec<f64>,
    pub hold: Vec<f64>,
    pub advantage: Vec<f64>,
    /// `ΔH_t` per period (`trades[0]` is zero).
    pub trades: Vec<Vec<f64>>,
    pub holdings: Vec<Vec<f64>>,
    /// Largest relative discrepancy seen in the identity check.
    pub identity_error: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn wealth_path<S: Strategy + ?Sized>(
    panel: &AssetPanel,
    strategy: &mut S,
) -> Result<WealthPath, NoArbError> {
    let n = panel.n_assets();
    let t_max = panel.horizon();
    let h0 = strategy.initial_holdings(n);
    if h0.len() != n {
        return Err(NoArbError::DimensionMismatch(
            "initial holdings do not match the asset count",
        ));
    }
    let prices = panel.prices();
    let dividends = panel.dividends();
    let w0 = dot(&prices[0], &h0);
    let mut out = WealthPath {
        wealth: vec![w0],
        hold: vec![w0],
        advantage: vec![0.0],
        trades: vec![vec![0.0; n]],
        holdings: vec![h0],
        identity_error: 0.0,
    };
    let mut trade = vec![0.0; n];
    for t in 1..=t_max {
        trade.iter_mut().for_each(|x| *x = 0.0);
        let prev = out.holdings[t - 1].clone();
        strategy.trade(
            &History::new(&prices[..t], &dividends[..t], &prev),
            &mut trade,
        );
        let h: Vec<f64> = prev.iter().zip(&trade).map(|(a, b)| a + b).collect();
        let (p, pp, d) = (&prices[t], &prices[t - 1], &dividends[t]);
        let ph = dot(p, &h);
        let cost = dot(&trade, pp);
        let dh = dot(d, &h);
        let w = ph - cost + dh;
        let w_star = dot(p, &prev) + dot(d, &prev);
        let r = w - w_star;
        let rhs: f64 = (0..n).map(|a| (p[a] - pp[a] + d[a]) * trade[a]).sum();
        let scale = 1f64.max(ph.abs() + cost.abs() + dh.abs() + w_star.abs());
        let err = (r - rhs).abs() / scale;
        if err > IDENTITY_TOLERANCE {
            return Err(NoArbError::IdentityViolation { t, lhs: r, rhs });
        }
        out.identity_error = out.identity_error.max(err);
        out.wealth.push(w);
        out.hold.push(w_star);
        out.advantage.push(r);
        out.trades.push(trade.clone());
        out.holdings.push(h);
    }
    Ok(out)
}
