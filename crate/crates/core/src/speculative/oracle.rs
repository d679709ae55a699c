//! Tail exponent of a one-lag Kesten process.
//!
//! For `r_t = α_t r_{t−1} + ε_t` with i.i.d. coefficients, stationarity needs
//! `E log|α| < 0`, and the stationary law has `P(|r| > x) ~ C x^{−κ}` where
//! `κ > 0` solves `E|α|^κ = 1`. `log E|α|^κ` is convex in `κ`, vanishes at 0
//! and starts downward, so it has at most one positive root.

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::dist::{Dist, DistError};

/// Largest exponent searched for a root.
pub const KAPPA_MAX: f64 = 256.0;
/// Tolerance on `E|α|^κ − 1` at the returned root.
pub const MOMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error("E log|α| = {0} is not negative; the recursion is not stationary")]
    NonStationary(f64),
    #[error("E|α|^κ stays below 1 for every κ up to {KAPPA_MAX}")]
    NoRoot,
    #[error("target exponent {0} must be positive and finite")]
    BadTarget(f64),
    #[error("coefficient distribution has E|α|^κ = {0}, cannot rescale")]
    Unscalable(f64),
}

/// Solves `E|α|^κ = 1` for `κ > 0` by bracketing and bisection on quadrature
/// moments.
pub fn tail_exponent_oracle(coef: &Dist) -> Result<f64, OracleError> {
    coef.validate()?;
    let mean_log = coef.mean_log_abs();
    if mean_log.is_nan() || mean_log >= 0.0 {
        return Err(OracleError::NonStationary(mean_log));
    }
    let log_moment = |k: f64| coef.abs_moment(k).ln();

    let mut lo = 0.0;
    let mut hi = 1.0 / 1024.0;
    loop {
        if log_moment(hi) >= 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > KAPPA_MAX {
            return Err(OracleError::NoRoot);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = log_moment(mid);
        if g.abs() < 1e-12 || hi - lo < 1e-14 {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Rescales `base` so that `E|α|^κ = 1` at the requested exponent, i.e. so
/// that a one-lag Kesten process with these coefficients has tail index
/// `kappa`.
pub fn calibrate_scale(base: &Dist, kappa: f64) -> Result<Dist, OracleError> {
    base.validate()?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(OracleError::BadTarget(kappa));
    }
    let m = base.abs_moment(kappa);
    if !(m > 0.0 && m.is_finite()) {
        return Err(OracleError::Unscalable(m));
    }
    Ok(base.scaled(m.powf(-1.0 / kappa)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_has_no_root() {
        let r = tail_exponent_oracle(&Dist::Degenerate { value: 0.5 });
        assert_eq!(r, Err(OracleError::NoRoot));
        assert_eq!(
            tail_exponent_oracle(&Dist::Degenerate { value: 0.0 }),
            Err(OracleError::NoRoot)
        );
    }

    #[test]
    fn expanding_two_point_is_non_stationary() {
        let r = tail_exponent_oracle(&Dist::SymmetricTwoPoint { magnitude: 2.0 });
        assert!(matches!(r, Err(OracleError::NonStationary(x)) if (x - 2f64.ln()).abs() < 1e-15));
    }

    #[test]
    fn uniform_root_matches_closed_form() {
        // E|U(-a, a)|^κ = a^κ / (κ + 1); with a = 4^{1/3}, κ = 3 is the root.
        let a = 4f64.powf(1.0 / 3.0);
        let k = tail_exponent_oracle(&Dist::Uniform { low: -a, high: a }).unwrap();
        assert!((k - 3.0).abs() < 1e-9, "{k}");
    }

    #[test]
    fn calibrated_normal_hits_target() {
        let d = calibrate_scale(&Dist::Normal { mean: 0.0, sd: 1.0 }, 3.0).unwrap();
        assert!((d.abs_moment(3.0) - 1.0).abs() < MOMENT_TOLERANCE);
        let k = tail_exponent_oracle(&d).unwrap();
        assert!((k - 3.0).abs() < 1e-8, "{k}");
    }

    #[test]
    fn rejects_bad_target() {
        let base = Dist::Normal { mean: 0.0, sd: 1.0 };
        assert_eq!(
            calibrate_scale(&base, 0.0),
            Err(OracleError::BadTarget(0.0))
        );
        assert!(matches!(
            calibrate_scale(&Dist::Degenerate { value: 0.0 }, 3.0),
            Err(OracleError::Unscalable(_))
        ));
    }
}
