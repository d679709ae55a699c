use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::hill::{default_tail_count, hill};
use super::TailError;

/// Sample autocorrelation at lags `1..=max_lag`, using the biased estimator
/// (autocovariances divided by `T`). Requires `T > 10 · max_lag`.
pub fn acf(xs: &[f64], max_lag: usize) -> Result<Vec<f64>, TailError> {
    let t = xs.len();
    if t < 2 {
        return Err(TailError::TooShort { needed: 2, got: t });
    }
    if let Some(index) = xs.iter().position(|x| !x.is_finite()) {
        return Err(TailError::NonFinite { index });
    }
    let mu = xs.iter().sum::<f64>() / t as f64;
    let d: Vec<f64> = xs.iter().map(|x| x - mu).collect();
    let c0: f64 = d.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) || xs.iter().all(|&x| x == xs[0]) {
        return Err(TailError::ZeroVariance);
    }
    let needed = 10 * max_lag + 1;
    if t < needed {
        return Err(TailError::TooShort { needed, got: t });
    }
    Ok((1..=max_lag)
        .map(|h| {
            let c: f64 = d[h..].iter().zip(&d).map(|(a, b)| a * b).sum();
            (c / c0).clamp(-1.0, 1.0)
        })
        .collect())
}

/// Autocorrelation of raw and absolute returns.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AcfReport {
    pub max_lag: usize,
    pub n: usize,
    /// Lags `1..=max_lag`; lag 0 is 1 by definition.
    pub raw: Vec<f64>,
    pub abs: Vec<f64>,
    /// `1.96 / √T`.
    pub band: f64,
    /// Hill exponent on the top 1% when the series is long enough.
    pub tail_alpha: Option<f64>,
    /// The tail exponent is at most 2, so the variance (and the ACF) may not
    /// exist.
    pub infinite_variance: bool,
}

impl AcfReport {
    /// Fraction of raw-return lags with `|acf| ≤ band`.
    pub fn raw_inside_fraction(&self) -> f64 {
        self.raw.iter().filter(|a| a.abs() <= self.band).count() as f64 / self.max_lag as f64
    }

    /// Fraction of absolute-return lags with `acf > band`.
    pub fn abs_above_fraction(&self) -> f64 {
        self.abs.iter().filter(|&&a| a > self.band).count() as f64 / self.max_lag as f64
    }
}

pub fn acf_report(returns: &[f64], max_lag: usize) -> Result<AcfReport, TailError> {
    let raw = acf(returns, max_lag)?;
    let mags: Vec<f64> = returns.iter().map(|r| r.abs()).collect();
    let abs = acf(&mags, max_lag)?;
    let n = returns.len();
    let k = default_tail_count(n);
    let tail_alpha = if n >= 1000 {
        hill(returns, k).ok().map(|h| h.alpha)
    } else {
        None
    };
    Ok(AcfReport {
        max_lag,
        n,
        raw,
        abs,
        band: 1.96 / (n as f64).sqrt(),
        tail_alpha,
        infinite_variance: tail_alpha.is_some_and(|a| a <= 2.0),
    })
}
