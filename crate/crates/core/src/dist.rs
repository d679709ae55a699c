//! One-dimensional distribution specs used for random coefficients,
//! shocks and trend weights.

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    BadParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), DistError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(DistError::BadParameter {
            name,
            value,
            reason,
        })
    }
}

/// A real-valued distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "family", rename_all = "snake_case")
)]
pub enum Dist {
    /// Point mass at `value`.
    Degenerate {
        value: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    /// `±magnitude` with probability ½ each.
    SymmetricTwoPoint {
        magnitude: f64,
    },
    Laplace {
        location: f64,
        scale: f64,
    },
}

impl Dist {
    pub fn validate(&self) -> Result<(), DistError> {
        match *self {
            Dist::Degenerate { value } => check("value", value, true, "must be finite"),
            Dist::Normal { mean, sd } => {
                check("mean", mean, true, "must be finite")?;
                check("sd", sd, sd >= 0.0, "must be non-negative")
            }
            Dist::Uniform { low, high } => {
                check("low", low, true, "must be finite")?;
                check("high", high, high >= low, "must not be below `low`")
            }
            Dist::SymmetricTwoPoint { magnitude } => check(
                "magnitude",
                magnitude,
                magnitude >= 0.0,
                "must be non-negative",
            ),
            Dist::Laplace { location, scale } => {
                check("location", location, true, "must be finite")?;
                check("scale", scale, scale >= 0.0, "must be non-negative")
            }
        }
    }

    /// Draws one value. Degenerate specs (including zero-width ones) consume
    /// no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Degenerate { value } => value,
            Dist::Normal { mean, sd } => {
                if sd == 0.0 {
                    mean
                } else {
                    let z: f64 = StandardNormal.sample(rng);
                    mean + sd * z
                }
            }
            Dist::Uniform { low, high } => {
                if low == high {
                    low
                } else {
                    low + (high - low) * rng.random::<f64>()
                }
            }
            Dist::SymmetricTwoPoint { magnitude } => {
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            Dist::Laplace { location, scale } => {
                if scale == 0.0 {
                    location
                } else {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    location - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Dist::Degenerate { value } => value,
            Dist::Normal { mean, .. } => mean,
            Dist::Uniform { low, high } => 0.5 * (low + high),
            Dist::SymmetricTwoPoint { .. } => 0.0,
            Dist::Laplace { location, .. } => location,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            Dist::Degenerate { .. } => true,
            Dist::Normal { sd, .. } => sd == 0.0,
            Dist::Uniform { low, high } => low == high,
            Dist::SymmetricTwoPoint { magnitude } => magnitude == 0.0,
            Dist::Laplace { scale, .. } => scale == 0.0,
        }
    }

    /// Multiplies the distribution by `s > 0`.
    pub fn scaled(&self, s: f64) -> Dist {
        match *self {
            Dist::Degenerate { value } => Dist::Degenerate { value: value * s },
            Dist::Normal { mean, sd } => Dist::Normal {
                mean: mean * s,
                sd: sd * s,
            },
            Dist::Uniform { low, high } => Dist::Uniform {
                low: low * s,
                high: high * s,
            },
            Dist::SymmetricTwoPoint { magnitude } => Dist::SymmetricTwoPoint {
                magnitude: magnitude * s,
            },
            Dist::Laplace { location, scale } => Dist::Laplace {
                location: location * s,
                scale: scale * s,
            },
        }
    }

    /// `E[g(|X|)]` for `g` defined on `[0, ∞)`, by quadrature for continuous
    /// families. `g` may have an integrable singularity at zero.
    pub fn expect_abs(&self, g: impl Fn(f64) -> f64) -> f64 {
        match *self {
            Dist::Degenerate { value } => g(value.abs()),
            Dist::SymmetricTwoPoint { magnitude } => g(magnitude),
            Dist::Normal { sd, mean } if sd == 0.0 => g(mean.abs()),
            Dist::Uniform { low, high } if low == high => g(low.abs()),
            Dist::Laplace { location, scale } if scale == 0.0 => g(location.abs()),
            Dist::Normal { mean, sd } => {
                let density = |x: f64| {
                    let z = (x - mean) / sd;
                    (-0.5 * z * z).exp() / (sd * (2.0 * core::f64::consts::PI).sqrt())
                };
                let reach = mean.abs() + 40.0 * sd;
                quad::integrate_from_zero(|y| g(y) * (density(y) + density(-y)), reach, sd / 8.0)
            }
            Dist::Uniform { low, high } => {
                let width = high - low;
                // |X| has density 1/width on each side of zero that X covers.
                let pos = high.max(0.0);
                let neg = (-low).max(0.0);
                let part = |lo: f64, hi: f64| {
                    if hi <= lo {
                        0.0
                    } else if lo == 0.0 {
                        quad::integrate_from_zero(&g, hi, hi / 64.0)
                    } else {
                        quad::integrate(&g, lo, hi, 64)
                    }
                };
                let pos_lo = low.max(0.0);
                let neg_lo = (-high).max(0.0);
                (part(pos_lo, pos) + part(neg_lo, neg)) / width
            }
            Dist::Laplace { location, scale } => {
                let density = |x: f64| (-(x - location).abs() / scale).exp() / (2.0 * scale);
                let reach = location.abs() + 800.0 * scale;
                quad::integrate_from_zero(|y| g(y) * (density(y) + density(-y)), reach, scale / 8.0)
            }
        }
    }

    /// `E|X|^κ`.
    pub fn abs_moment(&self, kappa: f64) -> f64 {
        self.expect_abs(|y| if y == 0.0 { 0.0 } else { y.powf(kappa) })
    }

    /// `E log|X|` (may be `-∞` when `X` has an atom at zero).
    pub fn mean_log_abs(&self) -> f64 {
        self.expect_abs(|y| y.ln())
    }
}
