use retrade_core::dist::Dist;
use retrade_core::speculative::{
    calibrate_scale, simulate_kesten, simulate_speculative_market, tail_exponent_oracle, KestenParams,
    MarketOptions, NewsProcess, TrendRule,
};
use retrade_core::tails::{acf_report, coefficient_variance_test, default_tail_count, hill, AcfReport};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{output, resolve, Common, Run};
use crate::config::{int, Experiment, Overrides};
use crate::error::{CliError, Result};
use crate::output::{num, Output};
use crate::series_file::Column;

#[derive(Debug, clap::Args)]
pub struct SpecArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reported steps after burn-in.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub agents: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct KestenArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reported steps after burn-in.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Rescale the coefficient distribution so that E|α|^κ = 1 at this κ.
    #[arg(long)]
    pub target_kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecExperiment {
    pub agents: usize,
    pub steps: usize,
    pub seed: u64,
    pub max_lag: usize,
    pub rule: TrendRule,
    pub news: NewsProcess,
    pub market: MarketOptions,
}

impl Default for SpecExperiment {
    fn default() -> Self {
        SpecExperiment {
            agents: 11,
            steps: 100_000,
            seed: 0,
            max_lag: 50,
            rule: TrendRule {
                lags: 1,
                weights: vec![Dist::Normal { mean: 0.0, sd: 0.5 }],
                noise_scale: 0.0,
                redraw: true,
            },
            news: NewsProcess {
                stay_calm: 0.995,
                stay_turbulent: 0.995,
                calm_scale: 0.01,
                turbulent_scale: 0.0125,
            },
            market: MarketOptions::default(),
        }
    }
}

impl Experiment for SpecExperiment {
    fn validate(&self) -> Result<()> {
        self.rule.validate().map_err(CliError::usage)?;
        self.news.validate().map_err(CliError::usage)?;
        if self.agents == 0 || self.steps == 0 || self.max_lag == 0 {
            return Err(CliError::Usage("agents, steps and max_lag must be at least 1".into()));
        }
        Ok(())
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KestenExperiment {
    /// Rescale the one-lag coefficient distribution to hit `target_kappa`.
    pub calibrate: bool,
    pub target_kappa: f64,
    pub process: KestenParams,
}

impl Default for KestenExperiment {
    fn default() -> Self {
        let normal = Dist::Normal { mean: 0.0, sd: 1.0 };
        KestenExperiment {
            calibrate: true,
            target_kappa: 3.0,
            process: KestenParams::one_lag(normal, normal, 100_000, 0),
        }
    }
}

impl KestenExperiment {
    /// The process actually simulated, after any calibration.
    pub fn params(&self) -> Result<KestenParams> {
        let mut p = self.process.clone();
        if self.calibrate {
            if p.lags != 1 || p.coefficients.len() != 1 {
                return Err(CliError::Usage(
                    "calibration needs a single lag with one coefficient distribution".into(),
                ));
            }
            p.coefficients[0] = calibrate_scale(&p.coefficients[0], self.target_kappa).map_err(CliError::usage)?;
        }
        p.validate().map_err(CliError::usage)?;
        Ok(p)
    }
}

impl Experiment for KestenExperiment {
    fn validate(&self) -> Result<()> {
        self.params().map(|_| ())
    }

    fn seed(&self) -> Option<u64> {
        Some(self.process.seed)
    }
}

pub fn acf_table(out: &mut Output, rep: &AcfReport) {
    out.table(
        "acf.csv",
        &["lag", "raw", "abs", "band"],
        (0..rep.max_lag).map(|i| [(i + 1).to_string(), num(rep.raw[i]), num(rep.abs[i]), num(rep.band)]),
    );
}

pub fn acf_summary(rep: &AcfReport) -> serde_json::Value {
    json!({
        "max_lag": rep.max_lag,
        "n": rep.n,
        "band": rep.band,
        "raw_inside_fraction": rep.raw_inside_fraction(),
        "abs_above_fraction": rep.abs_above_fraction(),
        "tail_alpha": rep.tail_alpha,
        "infinite_variance": rep.infinite_variance,
    })
}

pub fn run_spec(command: &'static str, args: &SpecArgs) -> Result<Run> {
    let mut o = Overrides::default();
    o.push_opt("seed", args.seed.map(int).transpose()?);
    o.push_opt("steps", args.steps.map(int).transpose()?);
    o.push_opt("agents", args.agents.map(int).transpose()?);
    let r = resolve::<SpecExperiment>(&args.common, o)?;
    let c = &r.config;
    let run = simulate_speculative_market(&c.rule, &c.news, c.agents, c.steps, c.seed, c.market)
        .map_err(CliError::data)?;
    let returns = &run.series.returns;
    let rep = acf_report(returns, c.max_lag).map_err(super::analyze::tail_error)?;
    let var = coefficient_variance_test(returns).ok();

    let mut out = output(command, &r);
    out.series("returns.csv", Column::Return, 1, returns);
    if let Some(p) = &run.series.prices {
        out.series("prices.csv", Column::Price, 0, p);
    }
    acf_table(&mut out, &rep);
    out.result("steps", returns.len());
    out.result("truncations", run.series.truncations);
    out.result("acf", acf_summary(&rep));
    out.result(
        "variance_regression",
        var.map(|v| json!({ "ar1_slope": v.ar1_slope, "slope": v.slope, "stderr": v.stderr, "z": v.z })),
    );
    let raw = rep.raw_inside_fraction();
    out.check(raw >= 0.9, format!("raw-return ACF inside the band at {raw:.2} of lags (limit 0.90)"));
    let mut lines = vec![format!(
        "{} returns: raw ACF inside band {:.2}, abs ACF above band {:.2}",
        returns.len(),
        raw,
        rep.abs_above_fraction()
    )];
    if rep.infinite_variance {
        lines.push("warning: tail exponent at most 2, the ACF may not exist".into());
    }
    Ok(Run { output: out, lines })
}

pub fn run_kesten(command: &'static str, args: &KestenArgs) -> Result<Run> {
    let mut o = Overrides::default();
    o.push_opt("process.seed", args.seed.map(int).transpose()?);
    o.push_opt("process.horizon", args.steps.map(int).transpose()?);
    if let Some(k) = args.target_kappa {
        o.push("calibrate", true);
        o.push("target_kappa", k);
    }
    let r = resolve::<KestenExperiment>(&args.common, o)?;
    let params = r.config.params()?;
    let run = simulate_kesten(&params).map_err(CliError::data)?;
    let returns = &run.series.returns;
    let kappa = if params.lags == 1 {
        tail_exponent_oracle(&params.coefficients[0]).ok()
    } else {
        None
    };
    let k = default_tail_count(returns.len());
    let h = hill(returns, k).ok();

    let mut out = output(command, &r);
    out.series("returns.csv", Column::Return, 1, returns);
    out.result("coefficients", &params.coefficients);
    out.result("oracle_kappa", kappa);
    out.result("hill", h);
    out.result(
        "warnings",
        run.warnings.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>(),
    );
    let mut lines = vec![format!("{} returns", returns.len())];
    if let Some(kappa) = kappa {
        lines.push(format!("oracle tail exponent {kappa:.4}"));
    }
    if let Some(h) = h {
        lines.push(format!("Hill (k = {}) {:.4} ± {:.4}", h.k, h.alpha, h.stderr));
    }
    if let (Some(kappa), Some(h)) = (kappa, h) {
        out.check(
            (h.alpha - kappa).abs() <= 0.3,
            format!("Hill {:.4} against oracle {kappa:.4} (tolerance 0.3)", h.alpha),
        );
    }
    Ok(Run { output: out, lines })
}
