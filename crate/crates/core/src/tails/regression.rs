use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::TailError;

/// OLS fit `x_t = c + φ x_{t−1} + e_t`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Ar1Fit {
    pub intercept: f64,
    pub slope: f64,
    pub residuals: Vec<f64>,
}

/// Simple regression of `y` on `x`: (intercept, slope, slope stderr).
fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64), TailError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return Err(TailError::ZeroVariance);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    Ok((intercept, slope, se))
}

pub fn ar1_ols(xs: &[f64]) -> Result<Ar1Fit, TailError> {
    if xs.len() < 3 {
        return Err(TailError::TooShort {
            needed: 3,
            got: xs.len(),
        });
    }
    let (intercept, slope, _) = ols(&xs[..xs.len() - 1], &xs[1..])?;
    let residuals = xs
        .windows(2)
        .map(|w| w[1] - intercept - slope * w[0])
        .collect();
    Ok(Ar1Fit {
        intercept,
        slope,
        residuals,
    })
}

/// Regression of squared AR(1) residuals on the squared lagged value.
///
/// With a random autoregressive coefficient `φ_t`, the conditional variance
/// is `Var(φ) x²_{t−1} + σ²`, so a significantly positive slope is the
/// signature of a time-varying coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct VarianceRegression {
    pub ar1_slope: f64,
    pub slope: f64,
    pub stderr: f64,
    pub z: f64,
}

pub fn coefficient_variance_test(xs: &[f64]) -> Result<VarianceRegression, TailError> {
    let fit = ar1_ols(xs)?;
    let lagged_sq: Vec<f64> = xs[..xs.len() - 1].iter().map(|x| x * x).collect();
    let resid_sq: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
    let (_, slope, stderr) = ols(&lagged_sq, &resid_sq)?;
    Ok(VarianceRegression {
        ar1_slope: fit.slope,
        slope,
        stderr,
        z: slope / stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn recovers_deterministic_ar1() {
        let mut rng = crate::rng::stream(5, 0);
        let mut xs = alloc::vec![1.0];
        for _ in 0..2000 {
            let last = *xs.last().unwrap();
            let e: f64 = rng.sample(rand_distr::StandardNormal);
            xs.push(0.5 + 0.3 * last + e);
        }
        let fit = ar1_ols(&xs).unwrap();
        assert!((fit.slope - 0.3).abs() < 0.05);
        assert!((fit.intercept - 0.5).abs() < 0.05);
        assert_eq!(fit.residuals.len(), 2000);
    }

    #[test]
    fn constant_series_is_rejected() {
        assert_eq!(ar1_ols(&[1.0; 10]).unwrap_err(), TailError::ZeroVariance);
    }
}
