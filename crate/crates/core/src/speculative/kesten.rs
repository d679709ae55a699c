//! Direct simulation of the random-coefficient autoregression.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Dist, DistError};
use crate::rng::{self, SimRng, MAIN_STREAM};
use crate::series::ReturnSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KestenError {
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error("at least one lag is required")]
    NoLags,
    #[error("horizon must be at least one step")]
    EmptyHorizon,
    #[error("expected 1 or {expected} coefficient distributions, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("E log|α| = {0} is not negative; the one-lag recursion is not stationary")]
    NonStationary(f64),
    #[error("expected {expected} shocks (burn-in plus horizon), got {got}")]
    ShockCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KestenWarning {
    /// No stationarity criterion is checked for more than one lag.
    StationarityUnchecked { lags: usize },
}

/// Parameters of `r_t = Σ_h α_{h,t} r_{t−h} + ε_t`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct KestenParams {
    pub lags: usize,
    /// One distribution per lag, or a single one shared by all lags.
    pub coefficients: Vec<Dist>,
    pub shock: Dist,
    pub horizon: usize,
    pub seed: u64,
}

impl KestenParams {
    pub fn one_lag(coefficient: Dist, shock: Dist, horizon: usize, seed: u64) -> Self {
        KestenParams {
            lags: 1,
            coefficients: alloc::vec![coefficient],
            shock,
            horizon,
            seed,
        }
    }

    /// Steps simulated and discarded before the first reported return.
    pub fn burn_in(&self) -> usize {
        10 * self.lags
    }

    pub fn coefficient(&self, lag: usize) -> &Dist {
        if self.coefficients.len() == 1 {
            &self.coefficients[0]
        } else {
            &self.coefficients[lag]
        }
    }

    pub fn validate(&self) -> Result<Vec<KestenWarning>, KestenError> {
        if self.lags == 0 {
            return Err(KestenError::NoLags);
        }
        if self.horizon == 0 {
            return Err(KestenError::EmptyHorizon);
        }
        if self.coefficients.len() != 1 && self.coefficients.len() != self.lags {
            return Err(KestenError::CoefficientCount {
                expected: self.lags,
                got: self.coefficients.len(),
            });
        }
        for d in &self.coefficients {
            d.validate()?;
        }
        self.shock.validate()?;
        if self.lags == 1 {
            let mean_log = self.coefficients[0].mean_log_abs();
            if mean_log.is_nan() || mean_log >= 0.0 {
                return Err(KestenError::NonStationary(mean_log));
            }
            Ok(Vec::new())
        } else {
            Ok(alloc::vec![KestenWarning::StationarityUnchecked {
                lags: self.lags
            }])
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KestenRun {
    pub series: ReturnSeries,
    pub warnings: Vec<KestenWarning>,
}

/// Simulates the recursion from a zero history, drawing fresh coefficients
/// every step, and returns the `horizon` returns after burn-in.
pub fn simulate_kesten(params: &KestenParams) -> Result<KestenRun, KestenError> {
    let warnings = params.validate()?;
    let mut rng = rng::stream(params.seed, MAIN_STREAM);
    let total = params.burn_in() + params.horizon;
    let shock = params.shock;
    let returns = recurse(params, total, &mut rng, |rng| shock.sample(rng));
    Ok(KestenRun {
        series: ReturnSeries::from_returns(returns),
        warnings,
    })
}

/// Same recursion with an externally supplied shock stream of length
/// `burn_in + horizon`; `params.shock` is ignored.
pub fn simulate_kesten_with_shocks(
    params: &KestenParams,
    shocks: &[f64],
) -> Result<KestenRun, KestenError> {
    let warnings = params.validate()?;
    let total = params.burn_in() + params.horizon;
    if shocks.len() != total {
        return Err(KestenError::ShockCount {
            expected: total,
            got: shocks.len(),
        });
    }
    let mut rng = rng::stream(params.seed, MAIN_STREAM);
    let mut next = shocks.iter().copied();
    let returns = recurse(params, total, &mut rng, |_| {
        next.next().expect("length checked")
    });
    Ok(KestenRun {
        series: ReturnSeries::from_returns(returns),
        warnings,
    })
}

fn recurse(
    params: &KestenParams,
    total: usize,
    rng: &mut SimRng,
    mut shock: impl FnMut(&mut SimRng) -> f64,
) -> Vec<f64> {
    let lags = params.lags;
    let mut r: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let mut acc = 0.0;
        for h in 1..=lags {
            let alpha = params.coefficient(h - 1).sample(rng);
            if t >= h {
                acc += alpha * r[t - h];
            }
        }
        acc += shock(rng);
        r.push(acc);
    }
    r.split_off(params.burn_in())
}
