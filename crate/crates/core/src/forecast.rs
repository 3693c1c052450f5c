//! Return forecasting from the joint dynamics of PMG and PML.
//!
//! A VAR(q) on `(PMG, PML)` yields `r^p = PMG^p - PML^p`. The closing-price
//! benchmark is an AR(1) ARCH-in-mean model. Out-of-sample accuracy is
//! measured against the expanding historical mean.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::decompose::DecomposedSeries;
use crate::error::{ensure_same_len, Error, Result};
use crate::market_data::Frequency;
use crate::ols::{fit_matrix, Ols};
use crate::optim::{minimize, numeric_hessian, OptimOptions};
use crate::stats::{mean, std_dev, variance};
use crate::ts_filter::Convergence;

/// One VAR equation. Coefficient order: constant, lags 1..q of PMG, lags
/// 1..q of PML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarEquation {
    pub coef: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarFit {
    pub q: usize,
    /// Index of the first fitted observation in the input series.
    pub first: usize,
    /// One past the last fitted observation.
    pub end: usize,
    pub pmg_eq: VarEquation,
    pub pml_eq: VarEquation,
    /// Residual covariance, divisor `T`.
    pub sigma: [[f64; 2]; 2],
    pub sic: f64,
    /// `(q, SIC)` for every candidate order on the common sample.
    pub sic_by_order: Vec<(usize, f64)>,
    /// In-sample R² of `r^p = PMG^p - PML^p` against `PMG - PML`.
    pub return_r_squared: f64,
}

impl VarFit {
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut names = vec!["const".to_string()];
        names.extend((1..=self.q).map(|i| format!("pmg_lag{i}")));
        names.extend((1..=self.q).map(|i| format!("pml_lag{i}")));
        names
    }

    /// One-step forecast of `(PMG_t, PML_t)` from data through `t - 1`.
    pub fn predict(&self, pmg: &[f64], pml: &[f64], t: usize) -> (f64, f64) {
        let eval = |c: &[f64]| {
            let mut v = c[0];
            for i in 1..=self.q {
                v += c[i] * pmg[t - i] + c[self.q + i] * pml[t - i];
            }
            v
        };
        (eval(&self.pmg_eq.coef), eval(&self.pml_eq.coef))
    }
}

fn var_design(pmg: &[f64], pml: &[f64], q: usize, first: usize, end: usize) -> DMatrix<f64> {
    DMatrix::from_fn(end - first, 2 * q + 1, |i, j| {
        let t = first + i;
        match j {
            0 => 1.0,
            j if j <= q => pmg[t - j],
            j => pml[t - (j - q)],
        }
    })
}

struct RawVar {
    eqs: [VarEquation; 2],
    resid: [Vec<f64>; 2],
    fitted: [Vec<f64>; 2],
}

fn ols_var(pmg: &[f64], pml: &[f64], q: usize, first: usize, end: usize) -> Result<RawVar> {
    let x = var_design(pmg, pml, q, first, end);
    let names: Vec<String> = (0..2 * q + 1).map(|j| j.to_string()).collect();
    let one = |y: &[f64]| -> Result<(VarEquation, Vec<f64>, Vec<f64>)> {
        let f = fit_matrix(&y[first..end], &x, names.clone(), true)?;
        let eq = VarEquation {
            coef: f.estimates(),
            std_errors: f.coefficients.iter().map(|c| c.std_error).collect(),
            t_stats: f.coefficients.iter().map(|c| c.t_stat).collect(),
            r_squared: f.r_squared,
        };
        Ok((eq, f.residuals, f.fitted))
    };
    let (g, gr, gf) = one(pmg)?;
    let (l, lr, lf) = one(pml)?;
    Ok(RawVar { eqs: [g, l], resid: [gr, lr], fitted: [gf, lf] })
}

fn residual_cov(resid: &[Vec<f64>; 2]) -> [[f64; 2]; 2] {
    let t = resid[0].len() as f64;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / t;
    let c01 = dot(&resid[0], &resid[1]);
    [[dot(&resid[0], &resid[0]), c01], [c01, dot(&resid[1], &resid[1])]]
}

/// `ln det(Sigma) + k ln(T) / T` with `k = 2(2q + 1)` free coefficients.
fn sic(sigma: &[[f64; 2]; 2], q: usize, t: usize) -> f64 {
    let det = sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[1][0];
    let t = t as f64;
    det.ln() + (2 * (2 * q + 1)) as f64 * t.ln() / t
}

/// VAR of order `q` on observations `q..n`.
pub fn fit_var_order(pmg: &[f64], pml: &[f64], q: usize) -> Result<VarFit> {
    ensure_same_len(pmg.len(), pml.len())?;
    if q == 0 {
        return Err(Error::InvalidSpec("VAR order must be positive".into()));
    }
    let n = pmg.len();
    if n < 4 * q + 3 {
        return Err(Error::InsufficientData { needed: 4 * q + 3, got: n, context: "fit_var_order" });
    }
    let raw = ols_var(pmg, pml, q, q, n)?;
    let sigma = residual_cov(&raw.resid);
    let t = n - q;
    let r: Vec<f64> = (q..n).map(|i| pmg[i] - pml[i]).collect();
    let rp: Vec<f64> = raw.fitted[0].iter().zip(&raw.fitted[1]).map(|(g, l)| g - l).collect();
    let [pmg_eq, pml_eq] = raw.eqs;
    Ok(VarFit {
        q,
        first: q,
        end: n,
        pmg_eq,
        pml_eq,
        sigma,
        sic: sic(&sigma, q, t),
        sic_by_order: vec![(q, sic(&sigma, q, t))],
        return_r_squared: in_sample_r2(&r, &rp),
    })
}

/// Select `q` in `1..=q_max` by SIC on the common sample `q_max..n` (ties to
/// the smaller order), then estimate the chosen order on `q..n`.
pub fn fit_var(pmg: &[f64], pml: &[f64], q_max: usize) -> Result<VarFit> {
    ensure_same_len(pmg.len(), pml.len())?;
    if q_max == 0 {
        return Err(Error::InvalidSpec("maximum VAR order must be positive".into()));
    }
    let n = pmg.len();
    if n <= 10 * q_max {
        return Err(Error::InsufficientData { needed: 10 * q_max + 1, got: n, context: "fit_var" });
    }
    let mut table = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let raw = ols_var(pmg, pml, q, q_max, n)?;
        table.push((q, sic(&residual_cov(&raw.resid), q, n - q_max)));
    }
    let best = table
        .iter()
        .fold(None::<(usize, f64)>, |acc, &(q, s)| match acc {
            Some((_, b)) if b <= s => acc,
            _ => Some((q, s)),
        })
        .map(|(q, _)| q)
        .unwrap_or(1);
    let mut fit = fit_var_order(pmg, pml, best)?;
    fit.sic_by_order = table;
    Ok(fit)
}

fn in_sample_r2(actual: &[f64], fitted: &[f64]) -> f64 {
    let m = mean(actual);
    let sse: f64 = actual.iter().zip(fitted).map(|(a, f)| (a - f).powi(2)).sum();
    let sst: f64 = actual.iter().map(|a| (a - m).powi(2)).sum();
    1.0 - sse / sst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMode {
    /// Fitted values over the estimation sample.
    InSample,
    /// One-step forecasts for `t = start..n` with coefficients frozen at the fit.
    StaticOos { start: usize },
}

/// Return forecasts `r^p_t = PMG^p_t - PML^p_t`.
pub fn forecast_returns(fit: &VarFit, pmg: &[f64], pml: &[f64], mode: ForecastMode) -> Result<Vec<f64>> {
    ensure_same_len(pmg.len(), pml.len())?;
    let (from, to) = match mode {
        ForecastMode::InSample => (fit.first, fit.end),
        ForecastMode::StaticOos { start } => (start, pmg.len()),
    };
    if from < fit.q || to > pmg.len() {
        return Err(Error::InsufficientData { needed: fit.q, got: from, context: "forecast_returns start" });
    }
    Ok((from..to)
        .map(|t| {
            let (g, l) = fit.predict(pmg, pml, t);
            g - l
        })
        .collect())
}

/// Leverage term in the ARCH-in-mean variance equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Leverage {
    /// `w3 * e_{t-1}^2 * 1{e_{t-1} < 0}`, `w3 >= 0`.
    #[default]
    SquaredShock,
    /// `w3 * 1{e_{t-1} < 0}`, `w0 + w3 > 0`.
    AsWritten,
}

impl std::str::FromStr for Leverage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "squared_shock" | "gjr" => Ok(Leverage::SquaredShock),
            "as_written" | "indicator" => Ok(Leverage::AsWritten),
            other => Err(Error::Config(format!("unknown leverage form `{other}`"))),
        }
    }
}

impl std::fmt::Display for Leverage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Leverage::SquaredShock => "squared_shock",
            Leverage::AsWritten => "as_written",
        })
    }
}

/// `r_t = d0 + d1 r_{t-1} + d2 h_t + e_t`,
/// `h_t^2 = w0 + w1 h_{t-1}^2 + w2 e_{t-1}^2 + leverage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchInMeanFit {
    pub delta: [f64; 3],
    /// All zero except `omega[0]` (the constant variance) when
    /// `constant_variance` is set.
    pub omega: [f64; 4],
    pub std_errors: Vec<f64>,
    pub log_likelihood: f64,
    pub r_squared: f64,
    pub constant_variance: bool,
    pub leverage: Leverage,
    pub convergence: Convergence,
    /// Observations in the likelihood (input length minus one).
    pub n: usize,
    pub fitted: Vec<f64>,
    pub conditional_variance: Vec<f64>,
}

impl ArchInMeanFit {
    pub fn param_names(&self) -> Vec<&'static str> {
        if self.constant_variance {
            vec!["delta0", "delta1", "sigma2"]
        } else {
            vec!["delta0", "delta1", "delta2", "omega0", "omega1", "omega2", "omega3"]
        }
    }
}

const LN_2PI: f64 = 1.837_877_066_409_345_3;

struct ArchMPath {
    loglik: f64,
    fitted: Vec<f64>,
    h2: Vec<f64>,
}

fn archm_admissible(p: &[f64; 7], lev: Leverage) -> bool {
    let [_, _, _, w0, w1, w2, w3] = *p;
    let base = w0 > 0.0 && w1 >= 0.0 && w2 >= 0.0 && p.iter().all(|v| v.is_finite());
    match lev {
        Leverage::SquaredShock => base && w3 >= 0.0 && w1 + w2 + 0.5 * w3 < 1.0,
        Leverage::AsWritten => base && w0 + w3 > 0.0 && w1 + w2 < 1.0,
    }
}

fn archm_path(r: &[f64], p: &[f64; 7], lev: Leverage, h0: f64) -> ArchMPath {
    let [d0, d1, d2, w0, w1, w2, w3] = *p;
    let n = r.len() - 1;
    let mut fitted = Vec::with_capacity(n);
    let mut h2v = Vec::with_capacity(n);
    let (mut h2_prev, mut e_prev) = (h0, 0.0);
    let mut e2_prev = h0;
    let mut ll = 0.0;
    let mut first = true;
    for t in 1..=n {
        // pre-sample shock sign is unknown: use its expectation
        let neg = if first {
            0.5
        } else if e_prev < 0.0 {
            1.0
        } else {
            0.0
        };
        let lev_term = match lev {
            Leverage::SquaredShock => w3 * e2_prev * neg,
            Leverage::AsWritten => w3 * neg,
        };
        let h2 = w0 + w1 * h2_prev + w2 * e2_prev + lev_term;
        let f = d0 + d1 * r[t - 1] + d2 * h2.sqrt();
        let e = r[t] - f;
        ll -= 0.5 * (LN_2PI + h2.ln() + e * e / h2);
        fitted.push(f);
        h2v.push(h2);
        h2_prev = h2;
        e2_prev = e * e;
        e_prev = e;
        first = false;
    }
    ArchMPath { loglik: if ll.is_nan() { f64::NEG_INFINITY } else { ll }, fitted, h2: h2v }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// QML fit of the ARCH-in-mean benchmark. With `constant_variance` the
/// variance is constant, `h_t` carries no information and the mean equation
/// reduces to an AR(1) fitted by least squares with `d2 = 0`.
pub fn fit_arch_in_mean(r: &[f64], constant_variance: bool, leverage: Leverage) -> Result<ArchInMeanFit> {
    let n = r.len();
    let needed = if constant_variance { 10 } else { 100 };
    if n < needed {
        return Err(Error::InsufficientData { needed, got: n, context: "fit_arch_in_mean" });
    }
    let ar = Ols::new(&r[1..]).intercept().regressor("lag1", &r[..n - 1]).fit()?;
    let d0 = ar.coef("const").unwrap_or(0.0);
    let d1 = ar.coef("lag1").unwrap_or(0.0);
    let actual = &r[1..];

    if constant_variance {
        let s2 = ar.ssr / (n - 1) as f64;
        let ll = -0.5 * (n - 1) as f64 * (LN_2PI + s2.ln() + 1.0);
        return Ok(ArchInMeanFit {
            delta: [d0, d1, 0.0],
            omega: [s2, 0.0, 0.0, 0.0],
            std_errors: ar
                .coefficients
                .iter()
                .map(|c| c.std_error)
                .chain([s2 * (2.0 / (n - 1) as f64).sqrt()])
                .collect(),
            log_likelihood: ll,
            r_squared: in_sample_r2(actual, &ar.fitted),
            constant_variance: true,
            leverage,
            convergence: Convergence::Converged,
            n: n - 1,
            fitted: ar.fitted.clone(),
            conditional_variance: vec![s2; n - 1],
        });
    }

    let s2 = variance(r, 0);
    if !(s2 > 0.0) {
        return Err(Error::ZeroVariance("fit_arch_in_mean"));
    }
    let s = s2.sqrt();
    let rbar = mean(r);
    let h0 = s2;

    // z: [d0~, d1, d2, ln(w0/s2), persistence logit, share logits (2), lev]
    let natural = |z: &[f64]| -> [f64; 7] {
        let d0 = rbar + s * z[0];
        let w0 = s2 * z[3].exp();
        let pers = logistic(z[4]);
        match leverage {
            Leverage::SquaredShock => {
                let ex = [1.0, z[5].exp(), z[6].exp()];
                let tot: f64 = ex.iter().sum();
                [d0, z[1], z[2], w0, pers * ex[0] / tot, pers * ex[1] / tot, 2.0 * pers * ex[2] / tot]
            }
            Leverage::AsWritten => {
                let share = logistic(z[5]);
                [d0, z[1], z[2], w0, pers * (1.0 - share), pers * share, w0 * (z[6].exp() - 1.0)]
            }
        }
    };
    let objective = |z: &[f64]| {
        let p = natural(z);
        if !archm_admissible(&p, leverage) {
            return f64::INFINITY;
        }
        -archm_path(r, &p, leverage, h0).loglik
    };
    // start: AR(1) mean, omega = 0.1 var, w1 = 0.85, w2 ~ 0.05, small leverage
    let z0 = match leverage {
        Leverage::SquaredShock => {
            vec![(d0 - rbar) / s, d1, 0.0, (0.1f64).ln(), (0.93f64 / 0.07).ln(), (-2.8f64), (-2.8f64)]
        }
        Leverage::AsWritten => {
            vec![(d0 - rbar) / s, d1, 0.0, (0.1f64).ln(), (0.9f64 / 0.1).ln(), (0.06f64 / 0.94).ln(), 0.0]
        }
    };
    let res = minimize(&objective, &z0, &OptimOptions { max_iter: 2000, ..OptimOptions::default() });
    let p = natural(&res.x);
    let path = archm_path(r, &p, leverage, h0);

    let nat_obj = |v: &[f64]| {
        let p: [f64; 7] = v.try_into().expect("seven parameters");
        if !archm_admissible(&p, leverage) {
            return f64::INFINITY;
        }
        -archm_path(r, &p, leverage, h0).loglik
    };
    let steps: Vec<f64> =
        p.iter().enumerate().map(|(i, v)| if i == 3 { 1e-3 * v.abs() } else { 1e-4 * v.abs().max(0.1) }).collect();
    let hess = numeric_hessian(&nat_obj, &p, &steps);
    let std_errors = {
        let m = DMatrix::from_fn(7, 7, |i, j| hess[i][j]);
        match m.cholesky() {
            Some(ch) => {
                let inv = ch.inverse();
                (0..7).map(|i| inv[(i, i)].sqrt()).collect()
            }
            None => vec![f64::NAN; 7],
        }
    };

    Ok(ArchInMeanFit {
        delta: [p[0], p[1], p[2]],
        omega: [p[3], p[4], p[5], p[6]],
        std_errors,
        log_likelihood: path.loglik,
        r_squared: in_sample_r2(actual, &path.fitted),
        constant_variance: false,
        leverage,
        convergence: if res.converged { Convergence::Converged } else { Convergence::MaxIter },
        n: n - 1,
        fitted: path.fitted,
        conditional_variance: path.h2,
    })
}

/// `1 - sum (r - r^p)^2 / sum (r - r^m)^2`.
pub fn r2_oos(actual: &[f64], benchmark: &[f64], model: &[f64]) -> Result<f64> {
    ensure_same_len(actual.len(), benchmark.len())?;
    ensure_same_len(actual.len(), model.len())?;
    if actual.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0, context: "r2_oos" });
    }
    let sse_model: f64 = actual.iter().zip(model).map(|(a, f)| (a - f).powi(2)).sum();
    let sse_bench: f64 = actual.iter().zip(benchmark).map(|(a, f)| (a - f).powi(2)).sum();
    Ok(1.0 - sse_model / sse_bench)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarkWest {
    /// `t`-statistic of the mean of the adjusted loss differential.
    pub statistic: f64,
    /// Upper-tail standard normal probability.
    pub p_value: f64,
    pub mean_f: f64,
    pub n: usize,
    pub f: Vec<f64>,
}

/// MSPE-adjusted test of a model forecast against a nested benchmark:
/// `f = (r - r^m)^2 - [(r - r^p)^2 - (r^m - r^p)^2]`, regressed on a constant.
pub fn clark_west(actual: &[f64], benchmark: &[f64], model: &[f64]) -> Result<ClarkWest> {
    ensure_same_len(actual.len(), benchmark.len())?;
    ensure_same_len(actual.len(), model.len())?;
    let n = actual.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n, context: "clark_west" });
    }
    let f: Vec<f64> = (0..n)
        .map(|t| {
            let (r, m, p) = (actual[t], benchmark[t], model[t]);
            (r - m).powi(2) - ((r - p).powi(2) - (m - p).powi(2))
        })
        .collect();
    let mean_f = mean(&f);
    let se = std_dev(&f) / (n as f64).sqrt();
    let statistic = if se > 0.0 {
        mean_f / se
    } else if mean_f == 0.0 {
        0.0
    } else {
        mean_f.signum() * f64::INFINITY
    };
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p_value = (1.0 - normal.cdf(statistic)).clamp(0.0, 1.0);
    Ok(ClarkWest { statistic, p_value, mean_f, n, f })
}

/// `r^m_t` for `t = start..n`: the mean of `r[..t]`.
pub fn expanding_mean(r: &[f64], start: usize) -> Vec<f64> {
    let mut sum: f64 = r[..start].iter().sum();
    let mut out = Vec::with_capacity(r.len() - start);
    for t in start..r.len() {
        out.push(sum / t as f64);
        sum += r[t];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosEvaluation {
    /// First out-of-sample index; the model is estimated on `..split`.
    pub split: usize,
    pub q: usize,
    pub var: VarFit,
    pub actual: Vec<f64>,
    pub forecasts: Vec<f64>,
    pub benchmark: Vec<f64>,
    pub r2_oos: f64,
    pub clark_west: ClarkWest,
}

/// Static out-of-sample evaluation: VAR selected and estimated on
/// `..split`, coefficients frozen, one-step forecasts for `split..n`.
pub fn evaluate_oos(
    pmg: &[f64],
    pml: &[f64],
    r: &[f64],
    split: usize,
    q_max: usize,
    min_train: usize,
) -> Result<OosEvaluation> {
    ensure_same_len(pmg.len(), pml.len())?;
    ensure_same_len(pmg.len(), r.len())?;
    if split < min_train {
        return Err(Error::InsufficientData { needed: min_train, got: split, context: "oos training window" });
    }
    if split >= r.len() {
        return Err(Error::InsufficientData { needed: split + 1, got: r.len(), context: "oos evaluation window" });
    }
    let var = fit_var(&pmg[..split], &pml[..split], q_max)?;
    let forecasts = forecast_returns(&var, pmg, pml, ForecastMode::StaticOos { start: split })?;
    let benchmark = expanding_mean(r, split);
    let actual = r[split..].to_vec();
    let r2 = r2_oos(&actual, &benchmark, &forecasts)?;
    let cw = clark_west(&actual, &benchmark, &forecasts)?;
    Ok(OosEvaluation { split, q: var.q, var, actual, forecasts, benchmark, r2_oos: r2, clark_west: cw })
}

/// Minimum training window: ten years of monthly data, ten years of
/// quarterly data.
pub fn min_training_window(freq: Frequency) -> usize {
    match freq {
        Frequency::Quarterly => 40,
        _ => 120,
    }
}

/// [`evaluate_oos`] on a decomposed series, splitting at the first period
/// on or after `split_date` and evaluating `r` (overnight removed).
pub fn evaluate_oos_at(d: &DecomposedSeries, split_date: chrono::NaiveDate, q_max: usize) -> Result<OosEvaluation> {
    let split = d.dates.partition_point(|x| *x < split_date);
    evaluate_oos(&d.pmg, &d.pml, &d.r, split, q_max, min_training_window(d.frequency))
}
