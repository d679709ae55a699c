#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{sorted_magnitudes, TailError};

/// Smallest tail the estimators accept.
pub const MIN_TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct HillEstimate {
    pub alpha: f64,
    pub stderr: f64,
    pub k: usize,
    /// The `(k+1)`-th largest magnitude.
    pub threshold: f64,
}

/// Top 1% of `n`, at least [`MIN_TAIL`].
pub fn default_tail_count(n: usize) -> usize {
    (n / 100).max(MIN_TAIL)
}

/// Hill estimator on the `k` largest magnitudes.
pub fn hill(xs: &[f64], k: usize) -> Result<HillEstimate, TailError> {
    let n = xs.len();
    if k < MIN_TAIL || k >= n {
        return Err(TailError::TailTooSmall { k, n });
    }
    let m = sorted_magnitudes(xs)?;
    hill_sorted(&m, k)
}

pub(crate) fn hill_sorted(m: &[f64], k: usize) -> Result<HillEstimate, TailError> {
    let n = m.len();
    let threshold = m[n - k - 1];
    if threshold <= 0.0 {
        return Err(TailError::ZeroMagnitudes);
    }
    let lt = threshold.ln();
    let s: f64 = m[n - k..].iter().map(|x| x.ln() - lt).sum();
    let alpha = k as f64 / s;
    Ok(HillEstimate {
        alpha,
        stderr: alpha / (k as f64).sqrt(),
        k,
        threshold,
    })
}

/// Hill at the top 1% and the top 0.1% of the sample.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct HillStability {
    pub wide: HillEstimate,
    pub narrow: HillEstimate,
    /// The two estimates agree within three combined standard errors.
    pub stable: bool,
}

pub fn hill_stability(xs: &[f64]) -> Result<HillStability, TailError> {
    let n = xs.len();
    let m = sorted_magnitudes(xs)?;
    let kw = default_tail_count(n);
    let kn = (n / 1000).max(MIN_TAIL);
    if kw >= n {
        return Err(TailError::TailTooSmall { k: kw, n });
    }
    let wide = hill_sorted(&m, kw)?;
    let narrow = hill_sorted(&m, kn)?;
    let tol = 3.0 * (wide.stderr * wide.stderr + narrow.stderr * narrow.stderr).sqrt();
    Ok(HillStability {
        wide,
        narrow,
        stable: (wide.alpha - narrow.alpha).abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn geometric_sample_matches_hand_value() {
        let xs: Vec<f64> = (1..=20).map(|i| (2.0f64).powi(i)).collect();
        // top 10 are 2^20..2^11 over threshold 2^10: sum of logs = 55 ln 2
        let h = hill(&xs, 10).unwrap();
        assert!((h.alpha - 10.0 / (55.0 * core::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(h.threshold, 1024.0);
        assert!((h.stderr - h.alpha / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ten_point_geometric_sample_below_minimum_tail() {
        let m: Vec<f64> = (1..=10).map(|i| (2.0f64).powi(i)).collect();
        // 2^10..2^6 over 2^5: 15 ln 2
        let h = hill_sorted(&m, 5).unwrap();
        assert!((h.alpha - 1.0 / (3.0 * core::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(hill(&m, 5), Err(TailError::TailTooSmall { k: 5, n: 10 }));
    }

    #[test]
    fn rejects_bad_k_and_zero_threshold() {
        let xs = [1.0; 20];
        assert_eq!(hill(&xs, 9), Err(TailError::TailTooSmall { k: 9, n: 20 }));
        assert_eq!(hill(&xs, 20), Err(TailError::TailTooSmall { k: 20, n: 20 }));
        let mut zs = [0.0; 20];
        zs[19] = 1.0;
        assert_eq!(hill(&zs, 10), Err(TailError::ZeroMagnitudes));
    }
}
