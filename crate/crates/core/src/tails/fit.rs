use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::hill::MIN_TAIL;
use super::{sorted_magnitudes, TailError};

/// Smallest sample [`fit_powerlaw`] accepts.
pub const MIN_SAMPLE: usize = 100;

/// Number of cutoffs tried on large samples, spaced evenly in log rank.
const GRID_POINTS: usize = 400;

/// Diagnostics on a power-law fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FitFlags {
    /// KS distance above the 5% critical value `1.36 / √n_tail`.
    pub ks_rejects: bool,
    /// Fewer than 1% of the observations lie in the fitted tail.
    pub small_tail: bool,
    /// Exponent above 6, where a power law is a poor description.
    pub steep: bool,
}

impl FitFlags {
    pub fn poor_fit(&self) -> bool {
        self.ks_rejects || self.small_tail || self.steep
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TailFit {
    pub alpha: f64,
    pub xmin: f64,
    pub ks_stat: f64,
    pub n_tail: usize,
    pub stderr: f64,
    pub n: usize,
    pub flags: FitFlags,
}

/// Fits `P{|r| ≥ x} = (x / xmin)^−α` above the cutoff minimising the
/// Kolmogorov–Smirnov distance between the empirical and fitted tails.
///
/// For a tail of `m` points `x ≥ xmin` the exponent is
/// `(m − 1) / Σ ln(x / xmin)`, which is the Hill estimate with `k = m − 1`.
pub fn fit_powerlaw(xs: &[f64]) -> Result<TailFit, TailError> {
    if xs.len() < MIN_SAMPLE {
        return Err(TailError::TooShort {
            needed: MIN_SAMPLE,
            got: xs.len(),
        });
    }
    let mut desc = sorted_magnitudes(xs)?;
    desc.reverse();
    let n = desc.len();
    let positive = desc.iter().take_while(|&&x| x > 0.0).count();
    if positive < MIN_TAIL + 1 {
        return Err(TailError::NoValidTail);
    }
    // prefix sums of ln x over the descending order
    let mut logs = Vec::with_capacity(positive + 1);
    logs.push(0.0);
    for x in &desc[..positive] {
        logs.push(logs.last().unwrap() + x.ln());
    }

    let mut best: Option<TailFit> = None;
    for m in candidate_sizes(positive) {
        let fit = fit_tail(&desc, &logs, m, n);
        let Some(fit) = fit else { continue };
        if best.is_none_or(|b| fit.ks_stat < b.ks_stat) {
            best = Some(fit);
        }
    }
    best.ok_or(TailError::NoValidTail)
}

/// Fit with the cutoff forced to `xmin`.
pub fn fit_powerlaw_at(xs: &[f64], xmin: f64) -> Result<TailFit, TailError> {
    if !(xmin > 0.0) {
        return Err(TailError::ZeroMagnitudes);
    }
    let mut desc = sorted_magnitudes(xs)?;
    desc.reverse();
    let m = desc.iter().take_while(|&&x| x >= xmin).count();
    let mut logs = Vec::with_capacity(m + 1);
    logs.push(0.0);
    for x in &desc[..m] {
        logs.push(logs.last().unwrap() + x.ln());
    }
    fit_tail(&desc, &logs, m, desc.len()).ok_or(TailError::NoValidTail)
}

fn candidate_sizes(positive: usize) -> Vec<usize> {
    let lo = MIN_TAIL + 1;
    if positive <= 4 * GRID_POINTS {
        return (lo..=positive).collect();
    }
    let (a, b) = ((lo as f64).ln(), (positive as f64).ln());
    let mut out: Vec<usize> = (0..GRID_POINTS)
        .map(|i| {
            (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64)
                .exp()
                .round() as usize
        })
        .map(|m| m.clamp(lo, positive))
        .collect();
    out.dedup();
    out
}

/// Fit on the `m` largest magnitudes (`desc[m−1]` is the cutoff). Ties at the
/// cutoff are pulled into the tail.
fn fit_tail(desc: &[f64], logs: &[f64], m: usize, n: usize) -> Option<TailFit> {
    let xmin = desc[m - 1];
    if !(xmin > 0.0) {
        return None;
    }
    let mut m = m;
    while m < logs.len() - 1 && desc[m] == xmin {
        m += 1;
    }
    if m < MIN_TAIL + 1 {
        return None;
    }
    let s = logs[m] - m as f64 * xmin.ln();
    if !(s > 0.0) {
        return None;
    }
    let alpha = (m - 1) as f64 / s;
    let ks_stat = ks_distance(&desc[..m], xmin, alpha);
    let flags = FitFlags {
        ks_rejects: ks_stat > 1.36 / (m as f64).sqrt(),
        small_tail: m * 100 < n,
        steep: alpha > 6.0,
    };
    Some(TailFit {
        alpha,
        xmin,
        ks_stat,
        n_tail: m,
        stderr: alpha / ((m - 1) as f64).sqrt(),
        n,
        flags,
    })
}

/// Two-sided KS distance between the empirical distribution of `tail`
/// (descending) and the fitted Pareto law.
fn ks_distance(tail: &[f64], xmin: f64, alpha: f64) -> f64 {
    let m = tail.len() as f64;
    let mut d: f64 = 0.0;
    // ascending position i (0-based) is tail[len − 1 − i]
    for (i, &x) in tail.iter().rev().enumerate() {
        let f = 1.0 - (x / xmin).powf(-alpha);
        let lo = i as f64 / m;
        let hi = (i + 1) as f64 / m;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tails::hill;

    #[test]
    fn needs_a_hundred_points() {
        assert_eq!(
            fit_powerlaw(&[1.0; 99]),
            Err(TailError::TooShort {
                needed: 100,
                got: 99
            })
        );
        assert_eq!(fit_powerlaw(&[0.0; 100]), Err(TailError::NoValidTail));
    }

    #[test]
    fn forced_cutoff_agrees_with_hill() {
        let xs: Vec<f64> = (1..=300)
            .map(|i| 1.0 / (i as f64 / 301.0).powf(1.0 / 3.0))
            .collect();
        let fit = fit_powerlaw(&xs).unwrap();
        let forced = fit_powerlaw_at(&xs, fit.xmin).unwrap();
        assert_eq!(forced.alpha, fit.alpha);
        let h = hill(&xs, fit.n_tail - 1).unwrap();
        assert!((h.alpha - fit.alpha).abs() <= 1e-12 * fit.alpha);
    }

    #[test]
    fn ks_is_zero_for_a_perfect_grid_in_the_limit() {
        let m = 2000;
        let xs: Vec<f64> = (0..m)
            .map(|i| (1.0 - (i as f64 + 0.5) / m as f64).powf(-1.0 / 3.0))
            .collect();
        let mut desc = xs.clone();
        desc.sort_unstable_by(|a, b| b.total_cmp(a));
        assert!(ks_distance(&desc, 1.0, 3.0) <= 0.5 / m as f64 + 1e-12);
    }
}
