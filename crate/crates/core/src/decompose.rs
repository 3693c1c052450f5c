//! Return decomposition into overnight return, potential maximum gain (PMG)
//! and potential maximum loss (PML).
//!
//! High-extreme convention, for a bar `(O, H, L, C)` preceded by close `C'`:
//!
//! ```text
//! OVR = ln O - ln C'      PMG = ln H - ln O      PML = ln H - ln C
//! ```
//!
//! Low-extreme convention keeps OVR and uses `PMG = ln C - ln L`,
//! `PML = ln O - ln L`. Under both, `r = ln C - ln O = PMG - PML` and the
//! full close-to-close return is `r_full = OVR + PMG - PML`.

use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::{BarSeries, Frequency};
use crate::ols::{Ols, OlsFit};
use crate::stats::mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    HighExtreme,
    LowExtreme,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "high" | "high_extreme" => Ok(Convention::HighExtreme),
            "low" | "low_extreme" => Ok(Convention::LowExtreme),
            other => Err(Error::Config(format!("unknown convention `{other}`"))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::HighExtreme => "high_extreme",
            Convention::LowExtreme => "low_extreme",
        })
    }
}

/// Per-period components; index `k` corresponds to bar `k + 1` of the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposedSeries {
    pub convention: Convention,
    pub frequency: Frequency,
    pub dates: Vec<NaiveDate>,
    /// Close-to-close log return, overnight gap included.
    pub r_full: Vec<f64>,
    /// Open-to-close log return (overnight removed).
    pub r: Vec<f64>,
    pub ovr: Vec<f64>,
    pub pmg: Vec<f64>,
    pub pml: Vec<f64>,
}

impl DecomposedSeries {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Restrict to periods with dates in `[from, to]`.
    pub fn slice_dates(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> DecomposedSeries {
        let keep: Vec<usize> = self
            .dates
            .iter()
            .enumerate()
            .filter(|(_, d)| from.is_none_or(|f| **d >= f) && to.is_none_or(|t| **d <= t))
            .map(|(i, _)| i)
            .collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        DecomposedSeries {
            convention: self.convention,
            frequency: self.frequency,
            dates: keep.iter().map(|&i| self.dates[i]).collect(),
            r_full: pick(&self.r_full),
            r: pick(&self.r),
            ovr: pick(&self.ovr),
            pmg: pick(&self.pmg),
            pml: pick(&self.pml),
        }
    }

    /// Index of the first period dated on or after `date`.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.iter().position(|d| *d >= date)
    }

    /// Emit `date,r_full,r,ovr,pmg,pml`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "date,r_full,r,ovr,pmg,pml")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.frequency.format_date(self.dates[i]),
                self.r_full[i],
                self.r[i],
                self.ovr[i],
                self.pmg[i],
                self.pml[i]
            )?;
        }
        Ok(())
    }
}

fn ln(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::NonPositivePrice(p));
    }
    Ok(p.ln())
}

pub fn decompose(series: &BarSeries, convention: Convention) -> Result<DecomposedSeries> {
    let bars = series.bars();
    if bars.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: bars.len(), context: "decompose" });
    }
    let n = bars.len() - 1;
    let mut out = DecomposedSeries {
        convention,
        frequency: series.frequency(),
        dates: Vec::with_capacity(n),
        r_full: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        ovr: Vec::with_capacity(n),
        pmg: Vec::with_capacity(n),
        pml: Vec::with_capacity(n),
    };
    for w in bars.windows(2) {
        let (prev, bar) = (&w[0], &w[1]);
        let (lc_prev, lo, lh, ll, lc) = (ln(prev.close)?, ln(bar.open)?, ln(bar.high)?, ln(bar.low)?, ln(bar.close)?);
        let (pmg, pml) = match convention {
            Convention::HighExtreme => (lh - lo, lh - lc),
            Convention::LowExtreme => (lc - ll, lo - ll),
        };
        debug_assert!(pmg >= 0.0 && pml >= 0.0);
        out.dates.push(bar.date);
        out.r_full.push(lc - lc_prev);
        out.r.push(lc - lo);
        out.ovr.push(lo - lc_prev);
        out.pmg.push(pmg);
        out.pml.push(pml);
    }
    Ok(out)
}

/// OLS of `r_full` on a constant and `r`; measures how much the overnight
/// gap matters.
pub fn overnight_share(d: &DecomposedSeries) -> Result<OlsFit> {
    if d.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: d.len(), context: "overnight_share" });
    }
    let m = mean(&d.r);
    if d.r.iter().all(|x| (x - m).abs() == 0.0) {
        return Err(Error::ZeroVariance("r"));
    }
    Ols::new(&d.r_full).intercept().regressor("r", &d.r).fit()
}

/// Lag-`i` cross-covariances of PMG and PML and their signed combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDecomposition {
    pub lag: usize,
    pub pmg_pmg: f64,
    pub pml_pml: f64,
    pub pmg_pml: f64,
    pub pml_pmg: f64,
    /// `pmg_pmg + pml_pml - pmg_pml - pml_pmg`
    pub combined: f64,
    /// Directly computed `Cov(r_t, r_{t-i})` on the same window.
    pub return_autocov: f64,
}

/// Covariance of `a_t` with `b_{t-lag}` over the aligned window, divisor `n - lag`.
pub fn lagged_cov(a: &[f64], b: &[f64], lag: usize) -> f64 {
    let lead = &a[lag..];
    let lagged = &b[..b.len() - lag];
    let (ma, mb) = (mean(lead), mean(lagged));
    lead.iter().zip(lagged).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / lead.len() as f64
}

pub fn covariance_decomposition(d: &DecomposedSeries, lag: usize) -> Result<CovarianceDecomposition> {
    if lag == 0 || lag >= d.len() {
        return Err(Error::InsufficientData { needed: lag + 1, got: d.len(), context: "covariance_decomposition lag" });
    }
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if constant(&d.pmg) && constant(&d.pml) {
        return Err(Error::ZeroVariance("pmg and pml"));
    }
    let pmg_pmg = lagged_cov(&d.pmg, &d.pmg, lag);
    let pml_pml = lagged_cov(&d.pml, &d.pml, lag);
    let pmg_pml = lagged_cov(&d.pmg, &d.pml, lag);
    let pml_pmg = lagged_cov(&d.pml, &d.pmg, lag);
    Ok(CovarianceDecomposition {
        lag,
        pmg_pmg,
        pml_pml,
        pmg_pml,
        pml_pmg,
        combined: (pmg_pmg + pml_pml) - (pmg_pml + pml_pmg),
        return_autocov: lagged_cov(&d.r, &d.r, lag),
    })
}
