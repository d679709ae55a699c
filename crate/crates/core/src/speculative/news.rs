//! Two-state news regime process.
//!
//! A calm/turbulent Markov chain scales Gaussian news shocks. Sticky regimes
//! leave the shocks serially uncorrelated while their magnitudes stay
//! correlated over long lags.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{self, NEWS_STREAM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewsError {
    #[error("stay probability `{name}` = {value} must lie strictly between 0 and 1")]
    StayProbability { name: &'static str, value: f64 },
    #[error("shock scale `{name}` = {value} must be positive")]
    Scale { name: &'static str, value: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Regime {
    Calm,
    Turbulent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NewsProcess {
    /// `P(calm → calm)`.
    pub stay_calm: f64,
    /// `P(turbulent → turbulent)`.
    pub stay_turbulent: f64,
    pub calm_scale: f64,
    pub turbulent_scale: f64,
}

impl NewsProcess {
    /// Regimes that cannot be told apart: i.i.d. shocks with scale `scale`.
    pub fn constant(scale: f64) -> Self {
        NewsProcess {
            stay_calm: 0.5,
            stay_turbulent: 0.5,
            calm_scale: scale,
            turbulent_scale: scale,
        }
    }

    pub fn validate(&self) -> Result<(), NewsError> {
        for (name, value) in [
            ("stay_calm", self.stay_calm),
            ("stay_turbulent", self.stay_turbulent),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(NewsError::StayProbability { name, value });
            }
        }
        for (name, value) in [
            ("calm_scale", self.calm_scale),
            ("turbulent_scale", self.turbulent_scale),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(NewsError::Scale { name, value });
            }
        }
        Ok(())
    }

    /// Long-run probability of the calm regime.
    pub fn stationary_calm(&self) -> f64 {
        let leave_calm = 1.0 - self.stay_calm;
        let leave_turbulent = 1.0 - self.stay_turbulent;
        leave_turbulent / (leave_calm + leave_turbulent)
    }

    pub fn scale(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Calm => self.calm_scale,
            Regime::Turbulent => self.turbulent_scale,
        }
    }

    fn next<R: Rng + ?Sized>(&self, regime: Regime, rng: &mut R) -> Regime {
        let u: f64 = rng.random();
        match regime {
            Regime::Calm if u < self.stay_calm => Regime::Calm,
            Regime::Calm => Regime::Turbulent,
            Regime::Turbulent if u < self.stay_turbulent => Regime::Turbulent,
            Regime::Turbulent => Regime::Calm,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NewsPath {
    pub regimes: Vec<Regime>,
    pub scales: Vec<f64>,
    pub shocks: Vec<f64>,
}

/// Samples `steps` regimes (the first from the stationary law) and the
/// shocks `scale(regime_t) · z_t`.
pub fn generate_news(news: &NewsProcess, steps: usize, seed: u64) -> Result<NewsPath, NewsError> {
    news.validate()?;
    let mut rng = rng::stream(seed, NEWS_STREAM);
    let mut path = NewsPath {
        regimes: Vec::with_capacity(steps),
        scales: Vec::with_capacity(steps),
        shocks: Vec::with_capacity(steps),
    };
    let mut regime = if rng.random::<f64>() < news.stationary_calm() {
        Regime::Calm
    } else {
        Regime::Turbulent
    };
    for t in 0..steps {
        if t > 0 {
            regime = news.next(regime, &mut rng);
        }
        let scale = news.scale(regime);
        let z: f64 = StandardNormal.sample(&mut rng);
        path.regimes.push(regime);
        path.scales.push(scale);
        path.shocks.push(scale * z);
    }
    Ok(path)
}
