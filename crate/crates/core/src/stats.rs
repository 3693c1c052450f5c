//! Descriptive statistics and classical diagnostics.
//!
//! Conventions: `std_dev` uses divisor `n - 1`; skewness and kurtosis are the
//! moment (biased) estimators, kurtosis non-excess; autocorrelations use the
//! divisor-`n` autocovariance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Variance with divisor `n - ddof`.
pub fn variance(x: &[f64], ddof: usize) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - ddof) as f64
}

pub fn std_dev(x: &[f64]) -> f64 {
    variance(x, 1).sqrt()
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

/// Upper-tail chi-square probability.
pub fn chi2_sf(stat: f64, df: f64) -> f64 {
    let d = ChiSquared::new(df).expect("positive degrees of freedom");
    (1.0 - d.cdf(stat)).clamp(0.0, 1.0)
}

/// Statistic with an upper-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistic {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
}

/// Autocorrelations at lags `0..=max_lag`.
pub fn acf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let centered: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    (0..=max_lag.min(n.saturating_sub(1)))
        .map(|k| centered[k..].iter().zip(&centered[..n - k]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect()
}

/// Ljung-Box portmanteau statistic `Q(L) = n(n+2) sum_k rho_k^2 / (n-k)`,
/// chi-square with `L` degrees of freedom.
pub fn ljung_box(x: &[f64], lags: usize) -> Result<TestStatistic> {
    let n = x.len();
    if lags == 0 || n < lags + 1 {
        return Err(Error::InsufficientData { needed: lags + 1, got: n, context: "ljung_box" });
    }
    if is_constant(x) {
        return Err(Error::ZeroVariance("ljung_box"));
    }
    let rho = acf(x, lags);
    let nf = n as f64;
    let q = nf * (nf + 2.0) * (1..=lags).map(|k| rho[k] * rho[k] / (nf - k as f64)).sum::<f64>();
    Ok(TestStatistic { statistic: q, p_value: chi2_sf(q, lags as f64), df: lags })
}

/// Moment skewness and (non-excess) kurtosis.
pub fn skew_kurt(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    (m3 / m2.powf(1.5), m4 / (m2 * m2))
}

/// Jarque-Bera `n/6 (S^2 + (K-3)^2/4)`, chi-square(2).
pub fn jarque_bera(x: &[f64]) -> Result<TestStatistic> {
    if x.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: x.len(), context: "jarque_bera" });
    }
    if is_constant(x) {
        return Err(Error::ZeroVariance("jarque_bera"));
    }
    let (s, k) = skew_kurt(x);
    let jb = x.len() as f64 / 6.0 * (s * s + (k - 3.0).powi(2) / 4.0);
    Ok(TestStatistic { statistic: jb, p_value: chi2_sf(jb, 2.0), df: 2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub max: f64,
    pub min: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub jarque_bera: f64,
    pub jb_pvalue: f64,
    /// `(lag, autocorrelation)` pairs in request order.
    pub acf: Vec<(usize, f64)>,
    pub q_lag: usize,
    pub ljung_box_q: f64,
    pub ljung_box_pvalue: f64,
}

pub fn summarize(x: &[f64], acf_lags: &[usize], q_lag: usize) -> Result<SummaryStats> {
    let n = x.len();
    let max_acf = acf_lags.iter().copied().max().unwrap_or(0);
    let needed = (q_lag + 1).max(max_acf + 1).max(3);
    if n < needed {
        return Err(Error::InsufficientData { needed, got: n, context: "summarize" });
    }
    if is_constant(x) {
        return Err(Error::ZeroVariance("summarize"));
    }
    let rho = acf(x, max_acf);
    let jb = jarque_bera(x)?;
    let lb = ljung_box(x, q_lag)?;
    let (skewness, kurtosis) = skew_kurt(x);
    Ok(SummaryStats {
        n,
        mean: mean(x),
        std_dev: std_dev(x),
        max: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min: x.iter().copied().fold(f64::INFINITY, f64::min),
        skewness,
        kurtosis,
        jarque_bera: jb.statistic,
        jb_pvalue: jb.p_value,
        acf: acf_lags.iter().map(|&k| (k, rho[k])).collect(),
        q_lag,
        ljung_box_q: lb.statistic,
        ljung_box_pvalue: lb.p_value,
    })
}

/// Pearson correlations with two-sided t-test p-values (`n - 2` dof).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub n: usize,
    pub corr: Vec<Vec<f64>>,
    pub p_values: Vec<Vec<f64>>,
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let d = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * (1.0 - d.cdf(t.abs()))).clamp(0.0, 1.0)
}

pub fn correlation_matrix(series: &[&[f64]]) -> Result<CorrelationMatrix> {
    let k = series.len();
    let n = series.first().map(|s| s.len()).unwrap_or(0);
    for s in series {
        crate::error::ensure_same_len(n, s.len())?;
    }
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n, context: "correlation_matrix" });
    }
    if series.iter().any(|s| is_constant(s)) {
        return Err(Error::ZeroVariance("correlation_matrix"));
    }
    let mut corr = vec![vec![1.0; k]; k];
    let mut p_values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..i {
            let r = pearson(series[i], series[j]);
            let p = correlation_p_value(r, n);
            corr[i][j] = r;
            corr[j][i] = r;
            p_values[i][j] = p;
            p_values[j][i] = p;
        }
    }
    Ok(CorrelationMatrix { n, corr, p_values })
}

/// `(x - mean) / std_dev`, with the `n - 1` standard deviation.
pub fn standardize(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 || is_constant(x) {
        return Err(Error::ZeroVariance("standardize"));
    }
    let m = mean(x);
    let s = std_dev(x);
    Ok(x.iter().map(|v| (v - m) / s).collect())
}
