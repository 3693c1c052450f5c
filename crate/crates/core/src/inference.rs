//! Granger causality, lagged impact regressions, regressions with external
//! controls, and the technical indicators used as controls.

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{ensure_same_len, Error, Result};
use crate::market_data::{BarSeries, Frequency, PredictorSeries};
use crate::ols::{fit_matrix, Coefficient, Ols, OlsFit};
use crate::stats::{mean, skew_kurt, std_dev};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub lag: usize,
    pub f_stat: f64,
    pub p_value: f64,
    /// Observations in the aligned regression sample.
    pub n: usize,
    pub df_num: usize,
    pub df_den: usize,
    pub ssr_restricted: f64,
    pub ssr_unrestricted: f64,
}

/// F-test that `lag` lags of `x` add explanatory power for `y` beyond a
/// constant and `lag` lags of `y`. Both regressions use the sample
/// `t = lag..n`.
pub fn granger_test(x: &[f64], y: &[f64], lag: usize) -> Result<GrangerResult> {
    granger_test_named(x, y, lag, "x", "y")
}

pub fn granger_test_named(x: &[f64], y: &[f64], lag: usize, cause: &str, effect: &str) -> Result<GrangerResult> {
    ensure_same_len(x.len(), y.len())?;
    let n = y.len();
    if lag == 0 {
        return Err(Error::InvalidSpec("granger lag must be positive".into()));
    }
    if n < 3 * lag + 2 {
        return Err(Error::InsufficientData { needed: 3 * lag + 2, got: n, context: "granger_test" });
    }
    let t_obs = n - lag;
    let target = &y[lag..];
    let design = |with_x: bool| {
        let k = 1 + lag * if with_x { 2 } else { 1 };
        DMatrix::from_fn(t_obs, k, |i, j| {
            let t = lag + i;
            match j {
                0 => 1.0,
                j if j <= lag => y[t - j],
                j => x[t - (j - lag)],
            }
        })
    };
    let names = |k: usize| (0..k).map(|j| j.to_string()).collect();
    let restricted = fit_matrix(target, &design(false), names(1 + lag), true)?;
    let unrestricted = fit_matrix(target, &design(true), names(1 + 2 * lag), true)?;
    let df_den = t_obs - 2 * lag - 1;
    let (ssr_r, ssr_u) = (restricted.ssr, unrestricted.ssr);
    let f_stat = (((ssr_r - ssr_u) / lag as f64) / (ssr_u / df_den as f64)).max(0.0);
    let dist = FisherSnedecor::new(lag as f64, df_den as f64)
        .map_err(|e| Error::InvalidSpec(format!("F distribution: {e}")))?;
    let p_value = if f_stat.is_finite() { (1.0 - dist.cdf(f_stat)).clamp(0.0, 1.0) } else { 0.0 };
    Ok(GrangerResult {
        cause: cause.to_string(),
        effect: effect.to_string(),
        lag,
        f_stat,
        p_value,
        n: t_obs,
        df_num: lag,
        df_den,
        ssr_restricted: ssr_r,
        ssr_unrestricted: ssr_u,
    })
}

/// OLS of `chi_t` on a constant and `psi_{t-i}`.
pub fn impact_regression(chi: &[f64], psi: &[f64], i: usize) -> Result<OlsFit> {
    ensure_same_len(chi.len(), psi.len())?;
    if i == 0 {
        return Err(Error::InvalidSpec("impact lag must be positive".into()));
    }
    if chi.len() <= i + 2 {
        return Err(Error::InsufficientData { needed: i + 3, got: chi.len(), context: "impact_regression" });
    }
    let lagged = &psi[..psi.len() - i];
    if lagged.iter().all(|v| *v == lagged[0]) {
        return Err(Error::ZeroVariance("impact_regression regressor"));
    }
    Ols::new(&chi[i..]).intercept().regressor("lagged", lagged).fit()
}

/// A control variable on the analysis calendar; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

impl Control {
    pub fn new(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Control { name: name.into(), values }
    }

    pub fn from_predictor(p: &PredictorSeries, calendar: &[NaiveDate]) -> Self {
        Control::new(p.name.clone(), p.aligned_to(calendar))
    }

    pub fn from_indicator(s: &IndicatorSeries, calendar: &[NaiveDate]) -> Self {
        let lookup: std::collections::HashMap<_, _> = s.dates.iter().zip(&s.values).collect();
        Control::new(s.name.clone(), calendar.iter().map(|d| lookup.get(d).copied().copied().flatten()).collect())
    }
}

/// `I_MA * MRI` and `(1 - I_MA) * MRI`, the state-dependent split of the
/// mean-reversion indicator.
pub fn state_dependent_mri(i_ma: &Control, mri: &Control) -> Result<(Control, Control)> {
    ensure_same_len(i_ma.values.len(), mri.values.len())?;
    let pair = |good: bool| {
        i_ma.values
            .iter()
            .zip(&mri.values)
            .map(|(s, m)| match (s, m) {
                (Some(s), Some(m)) => Some(if good { s * m } else { (1.0 - s) * m }),
                _ => None,
            })
            .collect()
    };
    Ok((
        Control::new(format!("{}*{}", i_ma.name, mri.name), pair(true)),
        Control::new(format!("(1-{})*{}", i_ma.name, mri.name), pair(false)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlRegression {
    pub fit: OlsFit,
    /// Candidate rows removed because some regressor was missing.
    pub rows_dropped: usize,
    /// Controls with no variation in the sample; reported with coefficient 0.
    pub dropped_controls: Vec<String>,
}

impl ControlRegression {
    pub fn coef(&self, name: &str) -> Option<f64> {
        self.fit.coef(name)
    }
}

/// OLS of `pmg_{t+1}` on a constant, `pml_t`, each control `M_t`, and
/// `M_{t+1}` when `include_contemporaneous` is set. All series share one
/// calendar; rows with any missing value are dropped.
///
/// Coefficient names: `const`, `lagged`, `<name>_t`, `<name>_t+1`.
pub fn control_regression(
    pmg_f: &[f64],
    pml_f: &[f64],
    controls: &[Control],
    include_contemporaneous: bool,
) -> Result<ControlRegression> {
    ensure_same_len(pmg_f.len(), pml_f.len())?;
    let n = pmg_f.len();
    for c in controls {
        ensure_same_len(n, c.values.len())?;
    }
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n, context: "control_regression" });
    }

    let mut columns: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    for c in controls {
        columns.push((format!("{}_t", c.name), c.values[..n - 1].to_vec()));
        if include_contemporaneous {
            columns.push((format!("{}_t+1", c.name), c.values[1..].to_vec()));
        }
    }

    let keep: Vec<usize> =
        (0..n - 1).filter(|&t| columns.iter().all(|(_, v)| v[t].is_some_and(f64::is_finite))).collect();
    let rows_dropped = n - 1 - keep.len();

    let mut dropped_controls = Vec::new();
    let mut retained: Vec<(String, Vec<f64>)> = Vec::new();
    for (name, v) in columns {
        let vals: Vec<f64> = keep.iter().map(|&t| v[t].unwrap_or(f64::NAN)).collect();
        if vals.iter().all(|x| *x == vals[0]) {
            dropped_controls.push(name);
        } else {
            retained.push((name, vals));
        }
    }

    let y: Vec<f64> = keep.iter().map(|&t| pmg_f[t + 1]).collect();
    let mut ols = Ols::new(&y).intercept().regressor_owned("lagged", keep.iter().map(|&t| pml_f[t]).collect());
    for (name, vals) in retained {
        ols = ols.regressor_owned(name, vals);
    }
    let mut fit = ols.fit()?;
    for name in &dropped_controls {
        log::warn!("control `{name}` has no variation in the sample; dropped");
        fit.coefficients.push(Coefficient {
            name: name.clone(),
            estimate: 0.0,
            std_error: f64::NAN,
            t_stat: f64::NAN,
            p_value: f64::NAN,
        });
    }
    Ok(ControlRegression { fit, rows_dropped, dropped_controls })
}

/// A technical indicator sampled at analysis-period ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<f64>>,
    /// First date with a value, if any.
    pub start: Option<NaiveDate>,
    /// Periods computed from less history than the nominal window (MRI's
    /// long-run mean only).
    pub short_history: Vec<bool>,
}

impl IndicatorSeries {
    fn new(name: &str, dates: Vec<NaiveDate>, values: Vec<Option<f64>>, short_history: Vec<bool>) -> Self {
        let start = dates.iter().zip(&values).find(|(_, v)| v.is_some()).map(|(d, _)| *d);
        IndicatorSeries { name: name.to_string(), dates, values, start, short_history }
    }
}

/// Window lengths for [`build_indicators`], in daily bars unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConfig {
    pub high_window: usize,
    pub ma_window: usize,
    pub skew_window: usize,
    /// Months in the trailing return used by MRI.
    pub mri_horizon: usize,
    /// Months in MRI's long-run mean.
    pub mri_mean_window: usize,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        IndicatorConfig { high_window: 250, ma_window: 200, skew_window: 200, mri_horizon: 12, mri_mean_window: 360 }
    }
}

/// Index of the last daily bar inside the period ending at `end`.
fn sample_index(dates: &[NaiveDate], end: NaiveDate, freq: Frequency) -> Option<usize> {
    let pos = dates.partition_point(|d| *d <= end);
    if pos == 0 {
        return None;
    }
    (freq.period_end(dates[pos - 1]) == end).then_some(pos - 1)
}

/// H52, Hmax, I_MA, SK and MRI at each date of `calendar` (period ends of
/// `freq`), all computed from daily closes.
pub fn build_indicators(daily: &BarSeries, calendar: &[NaiveDate], freq: Frequency) -> Result<Vec<IndicatorSeries>> {
    build_indicators_with(daily, calendar, freq, &IndicatorConfig::default())
}

pub fn build_indicators_with(
    daily: &BarSeries,
    calendar: &[NaiveDate],
    freq: Frequency,
    cfg: &IndicatorConfig,
) -> Result<Vec<IndicatorSeries>> {
    if daily.frequency() != Frequency::Daily {
        return Err(Error::Config("indicators require a daily bar series".into()));
    }
    if daily.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: daily.len(), context: "build_indicators" });
    }
    let dates = daily.dates();
    let p = daily.closes();
    let log_ret: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();

    let mut running_max = Vec::with_capacity(p.len());
    let mut m = f64::NEG_INFINITY;
    for v in &p {
        m = m.max(*v);
        running_max.push(m);
    }

    let idx: Vec<Option<usize>> = calendar.iter().map(|d| sample_index(&dates, *d, freq)).collect();
    let at = |f: &dyn Fn(usize) -> Option<f64>| -> Vec<Option<f64>> { idx.iter().map(|i| i.and_then(f)).collect() };

    let h52 = at(&|i| {
        (i + 1 >= cfg.high_window)
            .then(|| p[i] / p[i + 1 - cfg.high_window..=i].iter().copied().fold(f64::NEG_INFINITY, f64::max))
    });
    let hmax = at(&|i| Some(p[i] / running_max[i]));
    let i_ma = at(&|i| {
        (i + 1 >= cfg.ma_window).then(|| {
            let ma = mean(&p[i + 1 - cfg.ma_window..=i]);
            if p[i] > ma {
                1.0
            } else {
                0.0
            }
        })
    });
    // log_ret[k] is the return into bar k + 1
    let sk = at(&|i| (i >= cfg.skew_window).then(|| skew_kurt(&log_ret[i - cfg.skew_window..i]).0));

    // MRI on month-end closes drawn from the daily series.
    let mut month_ends: Vec<(NaiveDate, f64)> = Vec::new();
    for (d, v) in dates.iter().zip(&p) {
        let key = Frequency::Monthly.period_end(*d);
        match month_ends.last_mut() {
            Some(last) if last.0 == key => last.1 = *v,
            _ => month_ends.push((key, *v)),
        }
    }
    let h = cfg.mri_horizon;
    let monthly_ret: Vec<f64> = month_ends.windows(2).map(|w| (w[1].1 / w[0].1).ln()).collect();
    // cum[k]: h-month log return ending at month k (k >= h)
    let cum: Vec<Option<f64>> =
        (0..month_ends.len()).map(|k| (k >= h).then(|| (month_ends[k].1 / month_ends[k - h].1).ln())).collect();
    let first_cum = h;
    let mut mri = Vec::with_capacity(calendar.len());
    let mut mri_short = Vec::with_capacity(calendar.len());
    for (d, i) in calendar.iter().zip(&idx) {
        let k = i.and_then(|_| {
            let key = Frequency::Monthly.period_end(*d);
            month_ends.iter().position(|(m, _)| *m == key)
        });
        let value = k.and_then(|k| {
            let r = cum[k]?;
            let sigma = std_dev(&monthly_ret[k - h..k]) * (h as f64).sqrt();
            let lo = (k + 1).saturating_sub(cfg.mri_mean_window).max(first_cum);
            let hist: Vec<f64> = cum[lo..=k].iter().flatten().copied().collect();
            let short = k + 1 - first_cum < cfg.mri_mean_window;
            Some(((r - mean(&hist)) / sigma, short))
        });
        mri.push(value.map(|v| v.0).filter(|v| v.is_finite()));
        mri_short.push(value.is_some_and(|v| v.1));
    }

    let none = vec![false; calendar.len()];
    let out = vec![
        IndicatorSeries::new("H52", calendar.to_vec(), h52, none.clone()),
        IndicatorSeries::new("Hmax", calendar.to_vec(), hmax, none.clone()),
        IndicatorSeries::new("I_MA", calendar.to_vec(), i_ma, none.clone()),
        IndicatorSeries::new("MRI", calendar.to_vec(), mri, mri_short),
        IndicatorSeries::new("SK", calendar.to_vec(), sk, none),
    ];
    for s in &out {
        match s.start {
            Some(d) if Some(&d) != calendar.first() => {
                log::info!("indicator {} starts at {}", s.name, freq.format_date(d))
            }
            None => log::warn!("indicator {} has no values on this calendar", s.name),
            _ => {}
        }
    }
    Ok(out)
}
