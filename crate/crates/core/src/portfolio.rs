//! Mean-variance market timing with a single risky asset.
//!
//! At the end of period `t - 1` the investor holds
//! `w = (forecast_t - rf_t) / (gamma * var_t)` in equities, clamped to the
//! configured bounds, where `var_t` is the sample variance of the trailing
//! window of returns through `t - 1`. Realised utility is
//! `mean(R) - gamma/2 * var(R)` over the evaluation window.

use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_len, Error, Result};
use crate::forecast::OosEvaluation;
use crate::market_data::Frequency;
use crate::stats::{mean, std_dev, variance};

/// Rolling variances below this are treated as zero.
pub const MIN_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
    pub variance_window: usize,
    /// Multiplies the per-period utility difference; 1200 gives annualised
    /// percent for monthly data.
    pub annualization: f64,
}

impl BacktestConfig {
    pub fn for_frequency(freq: Frequency) -> Self {
        match freq {
            Frequency::Quarterly => BacktestConfig { variance_window: 40, annualization: 400.0, ..Self::default() },
            _ => Self::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::Config(format!("risk aversion must be positive, got {}", self.gamma)));
        }
        if !(self.lower < self.upper) {
            return Err(Error::Config(format!("weight bounds [{}, {}] are empty", self.lower, self.upper)));
        }
        if self.variance_window < 2 {
            return Err(Error::Config("variance window must be at least 2".into()));
        }
        Ok(())
    }
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig { gamma: 3.0, lower: 0.0, upper: 1.5, variance_window: 120, annualization: 1200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    /// Index of the first evaluated period in the return series.
    pub start: usize,
    pub weights_bench: Vec<f64>,
    pub weights_model: Vec<f64>,
    pub returns_bench: Vec<f64>,
    pub returns_model: Vec<f64>,
    pub rf: Vec<f64>,
    pub nu_bench: f64,
    pub nu_model: f64,
    /// `annualization * (nu_model - nu_bench)`.
    pub cer_gain: f64,
    pub sharpe_model: f64,
    pub sharpe_bench: f64,
    /// Sharpe ratio of holding the asset throughout.
    pub sharpe_buy_hold: f64,
    /// Pre-clamp weights outside the bounds.
    pub clamped_bench: usize,
    pub clamped_model: usize,
    pub r2_oos: Option<f64>,
    pub clark_west_p: Option<f64>,
}

impl BacktestReport {
    /// Per-period ledger `date,weight_bench,weight_model,ret_bench,ret_model,rf`.
    pub fn write_ledger<W: Write>(&self, mut w: W, dates: &[String]) -> std::io::Result<()> {
        writeln!(w, "date,weight_bench,weight_model,ret_bench,ret_model,rf")?;
        for k in 0..self.weights_bench.len() {
            let date = dates.get(k).map(String::as_str).unwrap_or("");
            writeln!(
                w,
                "{date},{},{},{},{},{}",
                self.weights_bench[k], self.weights_model[k], self.returns_bench[k], self.returns_model[k], self.rf[k]
            )?;
        }
        Ok(())
    }
}

/// Sample variances (divisor `n - 1`) of every length-`window` slice;
/// element `k` covers `r[k..k + window]`.
pub fn rolling_variance(r: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 2 || r.len() < window {
        return Err(Error::InsufficientData { needed: window.max(2), got: r.len(), context: "rolling_variance" });
    }
    let out: Vec<f64> = r.windows(window).map(|w| variance(w, 1)).collect();
    let flat = out.iter().filter(|v| **v < MIN_VARIANCE).count();
    if flat > 0 {
        log::warn!("{flat} rolling windows have zero variance");
    }
    Ok(out)
}

/// Mean-variance utility `mean - gamma/2 * var` (divisor `n - 1`).
pub fn realized_utility(returns: &[f64], gamma: f64) -> f64 {
    mean(returns) - 0.5 * gamma * variance(returns, 1)
}

/// Per-period Sharpe ratio of excess returns.
pub fn sharpe(excess: &[f64]) -> f64 {
    mean(excess) / std_dev(excess)
}

fn weight(excess_forecast: f64, var: f64, cfg: &BacktestConfig) -> (f64, bool) {
    if var < MIN_VARIANCE {
        let w = if excess_forecast > 0.0 { cfg.upper } else { cfg.lower };
        return (w, true);
    }
    let raw = excess_forecast / (cfg.gamma * var);
    let w = raw.clamp(cfg.lower, cfg.upper);
    (w, w != raw)
}

/// Backtest over `t = start..n` given benchmark and model forecasts of `r_t`
/// for those periods. `rf` has one per-period rate per element of `r`.
pub fn backtest(
    r: &[f64],
    rf: &[f64],
    start: usize,
    bench_forecast: &[f64],
    model_forecast: &[f64],
    cfg: &BacktestConfig,
) -> Result<BacktestReport> {
    cfg.validate()?;
    ensure_same_len(r.len(), rf.len())?;
    let n = r.len();
    if start >= n {
        return Err(Error::InsufficientData { needed: start + 1, got: n, context: "backtest window" });
    }
    ensure_same_len(n - start, bench_forecast.len())?;
    ensure_same_len(n - start, model_forecast.len())?;
    if start < cfg.variance_window {
        return Err(Error::InsufficientData {
            needed: cfg.variance_window,
            got: start,
            context: "variance window before first backtest period",
        });
    }
    if let Some(k) = (start..n).find(|&t| !rf[t].is_finite()) {
        return Err(Error::MissingValue(format!("risk-free rate at index {k}")));
    }
    if n - start < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n - start, context: "backtest periods" });
    }

    let m = n - start;
    let mut report = BacktestReport {
        config: *cfg,
        start,
        weights_bench: Vec::with_capacity(m),
        weights_model: Vec::with_capacity(m),
        returns_bench: Vec::with_capacity(m),
        returns_model: Vec::with_capacity(m),
        rf: rf[start..].to_vec(),
        nu_bench: 0.0,
        nu_model: 0.0,
        cer_gain: 0.0,
        sharpe_model: 0.0,
        sharpe_bench: 0.0,
        sharpe_buy_hold: 0.0,
        clamped_bench: 0,
        clamped_model: 0,
        r2_oos: None,
        clark_west_p: None,
    };
    for (k, t) in (start..n).enumerate() {
        let var = variance(&r[t - cfg.variance_window..t], 1);
        let (wb, cb) = weight(bench_forecast[k] - rf[t], var, cfg);
        let (wm, cm) = weight(model_forecast[k] - rf[t], var, cfg);
        report.clamped_bench += cb as usize;
        report.clamped_model += cm as usize;
        report.weights_bench.push(wb);
        report.weights_model.push(wm);
        report.returns_bench.push(wb * (r[t] - rf[t]) + rf[t]);
        report.returns_model.push(wm * (r[t] - rf[t]) + rf[t]);
    }
    if report.clamped_bench + report.clamped_model > 0 {
        log::info!("weights clamped: benchmark {} of {m}, model {} of {m}", report.clamped_bench, report.clamped_model);
    }
    report.nu_bench = realized_utility(&report.returns_bench, cfg.gamma);
    report.nu_model = realized_utility(&report.returns_model, cfg.gamma);
    report.cer_gain = cfg.annualization * (report.nu_model - report.nu_bench);
    let excess = |ret: &[f64]| -> Vec<f64> { ret.iter().zip(&report.rf).map(|(a, b)| a - b).collect() };
    report.sharpe_model = sharpe(&excess(&report.returns_model));
    report.sharpe_bench = sharpe(&excess(&report.returns_bench));
    report.sharpe_buy_hold = sharpe(&excess(&r[start..]));
    Ok(report)
}

/// Backtest driven by an out-of-sample evaluation; `r` must be the series
/// the evaluation forecast.
pub fn run_backtest(r: &[f64], rf: &[f64], eval: &OosEvaluation, cfg: &BacktestConfig) -> Result<BacktestReport> {
    let mut report = backtest(r, rf, eval.split, &eval.benchmark, &eval.forecasts, cfg)?;
    report.r2_oos = Some(eval.r2_oos);
    report.clark_west_p = Some(eval.clark_west.p_value);
    Ok(report)
}

/// Per-period risk-free rate from an annualised T-bill yield in decimal form.
pub fn risk_free_per_period(tbl: &[Option<f64>], freq: Frequency, dates: &[NaiveDate]) -> Result<Vec<f64>> {
    ensure_same_len(tbl.len(), dates.len())?;
    let k = freq.periods_per_year();
    tbl.iter()
        .zip(dates)
        .map(|(v, d)| v.map(|x| x / k).ok_or_else(|| Error::MissingValue(format!("risk-free rate at {d}"))))
        .collect()
}
