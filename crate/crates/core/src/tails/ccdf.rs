use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{sorted_magnitudes, TailError};

/// Empirical survival function `P{|r| ≥ x}` at each distinct magnitude.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CcdfCurve {
    pub magnitudes: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn ccdf(xs: &[f64]) -> Result<CcdfCurve, TailError> {
    if xs.is_empty() {
        return Err(TailError::Empty);
    }
    let m = sorted_magnitudes(xs)?;
    let n = m.len() as f64;
    let mut magnitudes = Vec::new();
    let mut probs = Vec::new();
    let mut i = 0;
    while i < m.len() {
        magnitudes.push(m[i]);
        probs.push((m.len() - i) as f64 / n);
        let x = m[i];
        while i < m.len() && m[i] == x {
            i += 1;
        }
    }
    Ok(CcdfCurve { magnitudes, probs })
}

impl CcdfCurve {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Least-squares slope of `ln P` against `ln x` over points with
    /// `lo ≤ x ≤ hi`. `None` with fewer than two usable points.
    pub fn log_log_slope(&self, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .magnitudes
            .iter()
            .zip(&self.probs)
            .filter(|(&x, _)| x > 0.0 && x >= lo && x <= hi)
            .map(|(&x, &p)| (x.ln(), p.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx == 0.0 {
            None
        } else {
            Some(sxy / sxx)
        }
    }

    /// Magnitude at which the survival probability first drops to `prob`.
    pub fn quantile_at(&self, prob: f64) -> Option<f64> {
        self.probs
            .iter()
            .position(|&p| p <= prob)
            .map(|i| self.magnitudes[i])
    }

    /// Slope over the decade of magnitudes starting where the survival
    /// probability reaches 10%.
    pub fn tail_decade_slope(&self) -> Option<f64> {
        let x = self.quantile_at(0.1)?;
        self.log_log_slope(x, 10.0 * x)
    }
}
