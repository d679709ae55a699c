//! Heavy-tail and autocorrelation estimators for return series.
//!
//! Everything here is a pure function of its input slice. Magnitudes are
//! taken as `|r|` throughout, so the functions accept raw returns directly.

mod acf;
mod ccdf;
mod fit;
mod hill;
mod regression;

pub use acf::{acf, acf_report, AcfReport};
pub use ccdf::{ccdf, CcdfCurve};
pub use fit::{fit_powerlaw, fit_powerlaw_at, FitFlags, TailFit, MIN_SAMPLE};
pub use hill::{default_tail_count, hill, hill_stability, HillEstimate, HillStability, MIN_TAIL};
pub use regression::{ar1_ols, coefficient_variance_test, Ar1Fit, VarianceRegression};

use alloc::vec::Vec;

use thiserror::Error;

use crate::series::ReturnSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    #[error("price {price} at index {index} is not positive")]
    NonPositivePrice { index: usize, price: f64 },
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series is empty")]
    Empty,
    #[error("tail count {k} is invalid for {n} observations (need 10 <= k < n)")]
    TailTooSmall { k: usize, n: usize },
    #[error("tail threshold magnitude is zero")]
    ZeroMagnitudes,
    #[error("no candidate cutoff leaves a usable tail")]
    NoValidTail,
    #[error("series has zero variance")]
    ZeroVariance,
}

/// `r_t = (p_t − p_{t−1}) / p_{t−1}`.
pub fn returns_from_prices(prices: &[f64]) -> Result<ReturnSeries, TailError> {
    if prices.len() < 2 {
        return Err(TailError::TooShort {
            needed: 2,
            got: prices.len(),
        });
    }
    for (index, &price) in prices.iter().enumerate() {
        if !price.is_finite() {
            return Err(TailError::NonFinite { index });
        }
        if price <= 0.0 {
            return Err(TailError::NonPositivePrice { index, price });
        }
    }
    let returns = prices.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    Ok(ReturnSeries {
        returns,
        prices: Some(prices.to_vec()),
        truncations: 0,
    })
}

/// `|x|` sorted ascending, rejecting non-finite input.
pub(crate) fn sorted_magnitudes(xs: &[f64]) -> Result<Vec<f64>, TailError> {
    let mut m = Vec::with_capacity(xs.len());
    for (index, x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return Err(TailError::NonFinite { index });
        }
        m.push(x.abs());
    }
    m.sort_unstable_by(f64::total_cmp);
    Ok(m)
}
