use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::strategy::Strategy;
use super::wealth::wealth_path;
use super::{MarketGenerator, MarketModel, NoArbError};
use crate::rng;
use crate::stats::Welford;

/// Smallest number of paths the Monte Carlo checks accept.
pub const MIN_PATHS: usize = 1000;

/// Significance threshold, in standard errors.
const Z_LIMIT: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MomentSummary {
    pub mean: f64,
    pub stderr: f64,
    pub z: f64,
}

impl From<&Welford> for MomentSummary {
    fn from(w: &Welford) -> Self {
        MomentSummary {
            mean: w.mean(),
            stderr: w.stderr(),
            z: w.z_score(),
        }
    }
}

/// What one simulated path contributes to the checks.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    /// `R_t` for `t = 1..=T`.
    pub advantage: Vec<f64>,
    /// `(β(p_t + d_t) − p_{t−1})·ΔH_t`, equal to `R_t` when `β = 1`.
    pub discounted: Vec<f64>,
    pub terminal_wealth: f64,
    pub terminal_hold: f64,
    pub identity_error: f64,
}

/// Simulates path number `path` of a run seeded with `seed`. Paths use
/// independent streams, so they may be evaluated in any order.
pub fn path_outcome<S: Strategy + Clone>(
    gen: &MarketGenerator,
    n_assets: usize,
    strategy: &S,
    seed: u64,
    path: u64,
) -> Result<PathOutcome, NoArbError> {
    let mut r = rng::path_stream(seed, path);
    let panel = gen.sample(n_assets, &mut r);
    let w = wealth_path(&panel, &mut strategy.clone())?;
    let beta = panel.beta();
    let discounted = if beta == 1.0 {
        w.advantage[1..].to_vec()
    } else {
        (1..=panel.horizon())
            .map(|t| {
                (0..n_assets)
                    .map(|a| {
                        (beta * (panel.price(t, a) + panel.dividend(t, a)) - panel.price(t - 1, a))
                            * w.trades[t][a]
                    })
                    .sum()
            })
            .collect()
    };
    Ok(PathOutcome {
        terminal_wealth: *w.wealth.last().expect("non-empty"),
        terminal_hold: *w.hold.last().expect("non-empty"),
        advantage: w.advantage[1..].to_vec(),
        discounted,
        identity_error: w.identity_error,
    })
}

/// Mean re-trade advantage per period and pooled over each path.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AdvantageReport {
    pub n_paths: usize,
    /// Discounted advantage for `t = 1..=T`.
    pub per_t: Vec<MomentSummary>,
    /// Per-path sum of the discounted advantage.
    pub pooled: MomentSummary,
    /// Per-path sum of the undiscounted `R_t`.
    pub pooled_raw: MomentSummary,
    pub max_identity_error: f64,
    /// `|z| < 3` at every period and pooled.
    pub pass: bool,
}

impl AdvantageReport {
    pub fn from_outcomes(outcomes: &[PathOutcome]) -> Self {
        let t_max = outcomes.first().map_or(0, |o| o.advantage.len());
        let mut per_t = alloc::vec![Welford::default(); t_max];
        let mut pooled = Welford::default();
        let mut pooled_raw = Welford::default();
        let mut max_identity_error: f64 = 0.0;
        for o in outcomes {
            for (w, &a) in per_t.iter_mut().zip(&o.discounted) {
                w.push(a);
            }
            pooled.push(o.discounted.iter().sum());
            pooled_raw.push(o.advantage.iter().sum());
            max_identity_error = max_identity_error.max(o.identity_error);
        }
        let per_t: Vec<MomentSummary> = per_t.iter().map(MomentSummary::from).collect();
        let pooled = MomentSummary::from(&pooled);
        let pass = pooled.z.abs() < Z_LIMIT && per_t.iter().all(|s| s.z.abs() < Z_LIMIT);
        AdvantageReport {
            n_paths: outcomes.len(),
            per_t,
            pooled,
            pooled_raw: MomentSummary::from(&pooled_raw),
            max_identity_error,
            pass,
        }
    }
}

fn check_paths(n_paths: usize) -> Result<(), NoArbError> {
    if n_paths < MIN_PATHS {
        Err(NoArbError::TooFewPaths {
            needed: MIN_PATHS,
            got: n_paths,
        })
    } else {
        Ok(())
    }
}

/// Monte Carlo estimate of the mean re-trade advantage of `strategy`.
pub fn test_no_retrade_advantage<S: Strategy + Clone>(
    model: &MarketModel,
    n_assets: usize,
    strategy: &S,
    n_paths: usize,
    seed: u64,
) -> Result<AdvantageReport, NoArbError> {
    check_paths(n_paths)?;
    let gen = MarketGenerator::new(*model)?;
    let outcomes = (0..n_paths as u64)
        .map(|i| path_outcome(&gen, n_assets, strategy, seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AdvantageReport::from_outcomes(&outcomes))
}

/// Concave increasing utility of terminal wealth.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "family", rename_all = "snake_case")
)]
pub enum Utility {
    Linear,
    /// `(w^{1−γ} − 1) / (1 − γ)`, or `ln w` at `γ = 1`; needs `w > 0`.
    Power {
        gamma: f64,
    },
    /// `(1 − e^{−a w}) / a`.
    Exponential {
        a: f64,
    },
}

impl Utility {
    pub fn validate(&self) -> Result<(), NoArbError> {
        match *self {
            Utility::Linear => Ok(()),
            Utility::Power { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            Utility::Exponential { a } if a > 0.0 && a.is_finite() => Ok(()),
            Utility::Power { gamma: x } | Utility::Exponential { a: x } => {
                Err(NoArbError::BadUtility(x))
            }
        }
    }

    pub fn eval(&self, w: f64) -> Result<f64, NoArbError> {
        match *self {
            Utility::Linear => Ok(w),
            Utility::Power { gamma } => {
                if !(w > 0.0) {
                    return Err(NoArbError::UtilityDomain(w));
                }
                if gamma == 1.0 {
                    Ok(w.ln())
                } else {
                    Ok((w.powf(1.0 - gamma) - 1.0) / (1.0 - gamma))
                }
            }
            Utility::Exponential { a } => Ok((1.0 - (-a * w).exp()) / a),
        }
    }
}

/// Expected utility of terminal wealth when trading against keeping the
/// previous position.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct JensenReport {
    pub n_paths: usize,
    pub trading: MomentSummary,
    pub holding: MomentSummary,
    /// Paired `u(W_T) − u(W*_T)`.
    pub difference: MomentSummary,
    pub max_identity_error: f64,
    /// Difference is at most three standard errors above zero.
    pub pass: bool,
    /// Difference is within three standard errors of zero.
    pub zero_within_ci: bool,
}

impl JensenReport {
    pub fn from_outcomes(utility: &Utility, outcomes: &[PathOutcome]) -> Result<Self, NoArbError> {
        let (mut trading, mut holding, mut diff) =
            (Welford::default(), Welford::default(), Welford::default());
        let mut max_identity_error: f64 = 0.0;
        for o in outcomes {
            let a = utility.eval(o.terminal_wealth)?;
            let b = utility.eval(o.terminal_hold)?;
            trading.push(a);
            holding.push(b);
            diff.push(a - b);
            max_identity_error = max_identity_error.max(o.identity_error);
        }
        let difference = MomentSummary::from(&diff);
        Ok(JensenReport {
            n_paths: outcomes.len(),
            trading: MomentSummary::from(&trading),
            holding: MomentSummary::from(&holding),
            difference,
            max_identity_error,
            pass: difference.mean <= Z_LIMIT * difference.stderr,
            zero_within_ci: difference.z.abs() < Z_LIMIT,
        })
    }
}

pub fn jensen_check<S: Strategy + Clone>(
    utility: &Utility,
    model: &MarketModel,
    n_assets: usize,
    strategy: &S,
    n_paths: usize,
    seed: u64,
) -> Result<JensenReport, NoArbError> {
    utility.validate()?;
    check_paths(n_paths)?;
    let gen = MarketGenerator::new(*model)?;
    let outcomes = (0..n_paths as u64)
        .map(|i| path_outcome(&gen, n_assets, strategy, seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    JensenReport::from_outcomes(utility, &outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utility_checks() {
        assert_eq!(
            Utility::Power { gamma: 0.0 }.validate(),
            Err(NoArbError::BadUtility(0.0))
        );
        assert_eq!(
            Utility::Exponential { a: -1.0 }.validate(),
            Err(NoArbError::BadUtility(-1.0))
        );
        assert_eq!(
            Utility::Power { gamma: 2.0 }.eval(-1.0),
            Err(NoArbError::UtilityDomain(-1.0))
        );
        assert!(
            (Utility::Power { gamma: 1.0 }
                .eval(core::f64::consts::E)
                .unwrap()
                - 1.0)
                .abs()
                < 1e-15
        );
        assert!((Utility::Power { gamma: 2.0 }.eval(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(Utility::Linear.eval(-3.0), Ok(-3.0));
    }
}
