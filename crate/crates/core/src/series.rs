//! Percent-return series and their price paths.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Returns floored here when a price path is materialised and `1 + r ≤ 0`.
pub const RETURN_FLOOR: f64 = -0.99;

/// A sequence of percent returns `r_t = Δp / p`, optionally with the aligned
/// price path `p_t = p_0 · Π (1 + r_s)` (one element longer than `returns`).
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ReturnSeries {
    pub returns: Vec<f64>,
    pub prices: Option<Vec<f64>>,
    /// Number of returns that were floored at [`RETURN_FLOOR`].
    pub truncations: usize,
}

impl ReturnSeries {
    pub fn from_returns(returns: Vec<f64>) -> Self {
        ReturnSeries {
            returns,
            prices: None,
            truncations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn abs_returns(&self) -> Vec<f64> {
        self.returns.iter().map(|r| r.abs()).collect()
    }

    /// Compounds the returns from `p0`, flooring any return with `1 + r ≤ 0`
    /// at [`RETURN_FLOOR`] and counting it.
    pub fn with_prices(&self, p0: f64) -> ReturnSeries {
        let mut returns = Vec::with_capacity(self.returns.len());
        let mut prices = Vec::with_capacity(self.returns.len() + 1);
        let mut truncations = self.truncations;
        let mut p = p0;
        prices.push(p);
        for &r in &self.returns {
            let r = if 1.0 + r <= 0.0 {
                truncations += 1;
                RETURN_FLOOR
            } else {
                r
            };
            p *= 1.0 + r;
            returns.push(r);
            prices.push(p);
        }
        ReturnSeries {
            returns,
            prices: Some(prices),
            truncations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn compounding_floors_wipeouts() {
        let s = ReturnSeries::from_returns(vec![0.1, -1.5, 0.0]).with_prices(100.0);
        assert_eq!(s.truncations, 1);
        assert_eq!(s.returns, vec![0.1, RETURN_FLOOR, 0.0]);
        let p = s.prices.unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|&x| x > 0.0));
        assert!((p[1] - 110.0).abs() < 1e-12);
        assert!((p[2] - 1.1).abs() < 1e-12);
    }
}
