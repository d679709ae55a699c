//! Summary statistics shared by the simulators and Monte Carlo checks.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (divides by `n − 1`).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (n - 1) as f64
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    /// `mean / stderr`; zero when both vanish.
    pub fn z_score(&self) -> f64 {
        z_score(self.mean(), self.stderr())
    }
}

pub fn z_score(mean: f64, stderr: f64) -> f64 {
    if stderr == 0.0 {
        if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / stderr
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Result of a one-sided Mann–Whitney rank-sum test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTest {
    /// `U` statistic of the second sample.
    pub u: f64,
    /// Tie-corrected normal approximation of `U`.
    pub z: f64,
    /// One-sided p-value for "second sample tends larger".
    pub p_value: f64,
}

/// Mann–Whitney test of `H1: larger` stochastically exceeds `smaller`.
pub fn mann_whitney_greater(smaller: &[f64], larger: &[f64]) -> RankTest {
    let n1 = smaller.len();
    let n2 = larger.len();
    let mut pooled: Vec<(f64, bool)> = smaller
        .iter()
        .map(|&x| (x, false))
        .chain(larger.iter().map(|&x| (x, true)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = pooled.len();
    let mut rank_sum_larger = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let ties = (j - i + 1) as f64;
        tie_term += ties * ties * ties - ties;
        for item in &pooled[i..=j] {
            if item.1 {
                rank_sum_larger += avg_rank;
            }
        }
        i = j + 1;
    }

    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let u = rank_sum_larger - n2f * (n2f + 1.0) / 2.0;
    let mean_u = n1f * n2f / 2.0;
    let var_u = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let z = if var_u > 0.0 {
        (u - mean_u) / var_u.sqrt()
    } else {
        0.0
    };
    RankTest {
        u,
        z,
        p_value: 1.0 - normal_cdf(z),
    }
}
