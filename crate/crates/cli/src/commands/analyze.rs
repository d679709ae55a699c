use std::path::{Path, PathBuf};

use retrade_core::tails::{acf_report, ccdf, default_tail_count, fit_powerlaw, hill, hill_stability, TailError};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::speculative::{acf_summary, acf_table};
use super::{output, resolve, Common, Run};
use crate::config::{int, sha256_hex, Experiment, Overrides};
use crate::error::{CliError, Result};
use crate::output::{num, Output};
use crate::series_file::{parse_series, SeriesError, SeriesFile};

/// Most points written to the CCDF table, spread evenly in log probability.
const CCDF_POINTS: usize = 1000;

#[derive(Debug, clap::Args)]
pub struct TailsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Series file with a `t,price` or `t,return` header.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Hill tail count [default: top 1%].
    #[arg(long)]
    pub k: Option<usize>,
    /// Expected tail exponent, checked with `--assert`.
    #[arg(long)]
    pub expect_alpha: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct AcfArgs {
    #[command(flatten)]
    pub common: Common,
    /// Series file with a `t,price` or `t,return` header.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub max_lag: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailsExperiment {
    pub input: String,
    pub k: Option<usize>,
    pub expect_alpha: Option<f64>,
    pub tolerance: f64,
}

impl Default for TailsExperiment {
    fn default() -> Self {
        TailsExperiment {
            input: String::new(),
            k: None,
            expect_alpha: None,
            tolerance: 0.3,
        }
    }
}

impl Experiment for TailsExperiment {
    fn validate(&self) -> Result<()> {
        require_input(&self.input)?;
        if !(self.tolerance >= 0.0) {
            return Err(CliError::Usage("tolerance must be non-negative".into()));
        }
        Ok(())
    }

    fn seed(&self) -> Option<u64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfExperiment {
    pub input: String,
    pub max_lag: usize,
    /// Check: least fraction of raw-return lags inside the band.
    pub min_raw_inside: f64,
    /// Check: least fraction of absolute-return lags above the band.
    pub min_abs_above: f64,
}

impl Default for AcfExperiment {
    fn default() -> Self {
        AcfExperiment {
            input: String::new(),
            max_lag: 50,
            min_raw_inside: 0.9,
            min_abs_above: 0.6,
        }
    }
}

impl Experiment for AcfExperiment {
    fn validate(&self) -> Result<()> {
        require_input(&self.input)?;
        if self.max_lag == 0 {
            return Err(CliError::Usage("max_lag must be at least 1".into()));
        }
        Ok(())
    }

    fn seed(&self) -> Option<u64> {
        None
    }
}

fn require_input(input: &str) -> Result<()> {
    if input.is_empty() {
        return Err(CliError::Usage("no input series: pass --input or set `input`".into()));
    }
    Ok(())
}

fn input_flag(o: &mut Overrides, input: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = input {
        let s = p
            .to_str()
            .ok_or_else(|| CliError::Usage(format!("input path {} is not UTF-8", p.display())))?;
        o.push("input", s);
    }
    Ok(())
}

fn load(out: &mut Output, input: &str) -> Result<SeriesFile> {
    let path = Path::new(input);
    let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("cannot read {input}: {e}")))?;
    out.input(path, sha256_hex(&bytes));
    parse_series(&bytes).map_err(|e| series_error(input, e))
}

fn series_error(input: &str, e: SeriesError) -> CliError {
    match e {
        SeriesError::Parse { .. } => CliError::Data(format!("{input}: parse error at {e}")),
        SeriesError::Schema { .. } => CliError::Data(format!("{input}: schema error at {e}")),
        other => CliError::Data(format!("{input}: {other}")),
    }
}

pub fn tail_error(e: TailError) -> CliError {
    match e {
        TailError::ZeroVariance => CliError::Data("ZeroVariance: the series has zero variance".into()),
        other => CliError::data(other),
    }
}

/// Indices of at most `max` points of a survival curve, spread evenly in
/// log probability; the first and last points are always kept.
fn thin(probs: &[f64], max: usize) -> Vec<usize> {
    let n = probs.len();
    if n <= max {
        return (0..n).collect();
    }
    let (hi, lo) = (probs[0].ln(), probs[n - 1].ln());
    let step = (hi - lo) / (max - 1) as f64;
    let mut keep = vec![0];
    let mut next = hi - step;
    for (i, p) in probs.iter().enumerate().skip(1) {
        if p.ln() <= next || i == n - 1 {
            keep.push(i);
            while next >= p.ln() {
                next -= step;
            }
        }
    }
    keep
}

pub fn run_tails(command: &'static str, args: &TailsArgs) -> Result<Run> {
    let mut o = Overrides::default();
    input_flag(&mut o, &args.input)?;
    o.push_opt("k", args.k.map(int).transpose()?);
    o.push_opt("expect_alpha", args.expect_alpha);
    let r = resolve::<TailsExperiment>(&args.common, o)?;
    let c = &r.config;
    let mut out = output(command, &r);
    let series = load(&mut out, &c.input)?;
    let returns = series.returns().map_err(|e| series_error(&c.input, e))?;
    let xs = &returns.returns;
    if xs.len() >= 2 && xs.windows(2).all(|w| w[0] == w[1]) {
        return Err(tail_error(TailError::ZeroVariance));
    }
    let k = c.k.unwrap_or_else(|| default_tail_count(xs.len()));
    let h = hill(xs, k).map_err(tail_error)?;
    let fit = fit_powerlaw(xs);
    let stability = hill_stability(xs).ok();
    let curve = ccdf(xs).map_err(tail_error)?;

    let keep = thin(&curve.probs, CCDF_POINTS);
    out.table(
        "ccdf.csv",
        &["magnitude", "probability"],
        keep.iter().map(|&i| [num(curve.magnitudes[i]), num(curve.probs[i])]),
    );
    let ks: Vec<usize> = {
        let top = (xs.len() / 10).max(11).min(xs.len() - 1);
        let mut ks: Vec<usize> = (0..=40)
            .map(|i| (10.0 * (top as f64 / 10.0).powf(i as f64 / 40.0)).round() as usize)
            .collect();
        ks.dedup();
        ks
    };
    out.table(
        "hill.csv",
        &["k", "alpha", "stderr"],
        ks.iter()
            .filter_map(|&k| hill(xs, k).ok())
            .map(|e| [e.k.to_string(), num(e.alpha), num(e.stderr)]),
    );
    out.result("n", xs.len());
    out.result("column", series.column.name());
    out.result("hill", h);
    out.result("hill_stability", stability);
    out.result("tail_decade_slope", curve.tail_decade_slope());
    let mut lines = vec![format!(
        "{} returns, Hill (k = {}) alpha = {:.4} ± {:.4}",
        xs.len(),
        h.k,
        h.alpha,
        h.stderr
    )];
    match &fit {
        Ok(f) => {
            out.result("powerlaw", f);
            lines.push(format!(
                "power-law fit alpha = {:.4}, xmin = {:.6}, n_tail = {}",
                f.alpha, f.xmin, f.n_tail
            ));
            if f.flags.poor_fit() {
                lines.push("warning: poor power-law fit".into());
            }
        }
        Err(e) => out.result("powerlaw", json!({ "error": e.to_string() })),
    }
    if stability.is_some_and(|s| !s.stable) {
        lines.push("warning: Hill estimate moves with the tail count".into());
    }
    if let Some(a) = c.expect_alpha {
        out.check(
            (h.alpha - a).abs() <= c.tolerance,
            format!("Hill {:.4} against expected {a} (tolerance {})", h.alpha, c.tolerance),
        );
    }
    Ok(Run { output: out, lines })
}

pub fn run_acf(command: &'static str, args: &AcfArgs) -> Result<Run> {
    let mut o = Overrides::default();
    input_flag(&mut o, &args.input)?;
    o.push_opt("max_lag", args.max_lag.map(int).transpose()?);
    let r = resolve::<AcfExperiment>(&args.common, o)?;
    let c = &r.config;
    let mut out = output(command, &r);
    let series = load(&mut out, &c.input)?;
    let returns = series.returns().map_err(|e| series_error(&c.input, e))?;
    let rep = acf_report(&returns.returns, c.max_lag).map_err(tail_error)?;

    acf_table(&mut out, &rep);
    out.result("column", series.column.name());
    out.result("acf", acf_summary(&rep));
    let (raw, abs) = (rep.raw_inside_fraction(), rep.abs_above_fraction());
    out.check(
        raw >= c.min_raw_inside && abs >= c.min_abs_above,
        format!(
            "raw ACF inside band {raw:.2} (limit {}), abs ACF above band {abs:.2} (limit {})",
            c.min_raw_inside, c.min_abs_above
        ),
    );
    let mut lines = vec![format!(
        "{} returns: raw ACF inside band {raw:.2}, abs ACF above band {abs:.2}",
        rep.n
    )];
    if rep.infinite_variance {
        lines.push(format!(
            "warning: tail exponent {:.2} is at most 2, the ACF may not exist",
            rep.tail_alpha.unwrap_or(f64::NAN)
        ));
    }
    Ok(Run { output: out, lines })
}
