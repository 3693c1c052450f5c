//! Ordinary least squares with classical (homoskedastic) inference.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Designs whose reciprocal condition number falls below this are rejected.
pub const SINGULAR_RCOND: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub ssr: f64,
    pub n: usize,
    pub df_resid: usize,
    pub condition_number: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl OlsFit {
    pub fn coef(&self, name: &str) -> Option<f64> {
        self.get(name).map(|c| c.estimate)
    }

    pub fn get(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    /// Residual variance `SSR / (n - k)`.
    pub fn sigma2(&self) -> f64 {
        self.ssr / self.df_resid as f64
    }
}

/// Column-wise regression builder.
///
/// ```
/// use pricext_core::ols::Ols;
/// let y = [1.0, 3.0, 5.1, 6.9];
/// let x = [0.0, 1.0, 2.0, 3.0];
/// let fit = Ols::new(&y).intercept().regressor("x", &x).fit().unwrap();
/// assert!((fit.coef("x").unwrap() - 1.98).abs() < 1e-9);
/// ```
#[derive(Debug, Clone)]
pub struct Ols<'a> {
    y: &'a [f64],
    columns: Vec<(String, Vec<f64>)>,
    has_intercept: bool,
}

impl<'a> Ols<'a> {
    pub fn new(y: &'a [f64]) -> Self {
        Ols { y, columns: Vec::new(), has_intercept: false }
    }

    pub fn intercept(mut self) -> Self {
        self.has_intercept = true;
        self.columns.push(("const".to_string(), vec![1.0; self.y.len()]));
        self
    }

    pub fn regressor(mut self, name: impl Into<String>, x: &[f64]) -> Self {
        self.columns.push((name.into(), x.to_vec()));
        self
    }

    pub fn regressor_owned(mut self, name: impl Into<String>, x: Vec<f64>) -> Self {
        self.columns.push((name.into(), x));
        self
    }

    pub fn fit(self) -> Result<OlsFit> {
        let n = self.y.len();
        for (_, c) in &self.columns {
            crate::error::ensure_same_len(n, c.len())?;
        }
        let k = self.columns.len();
        let x = DMatrix::from_fn(n, k, |i, j| self.columns[j].1[i]);
        let names = self.columns.into_iter().map(|(n, _)| n).collect();
        fit_matrix(self.y, &x, names, self.has_intercept)
    }
}

/// Least-squares fit of `y` on the columns of `x` via the SVD.
pub fn fit_matrix(y: &[f64], x: &DMatrix<f64>, names: Vec<String>, centered_r2: bool) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(Error::InsufficientData { needed: k + 1, got: n, context: "ols observations" });
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(smin > smax * SINGULAR_RCOND) {
        return Err(Error::Singular { condition });
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let yv = DVector::from_column_slice(y);
    let uty = u.transpose() * &yv;
    let scaled = DVector::from_fn(k, |i, _| uty[i] / svd.singular_values[i]);
    let beta = v_t.transpose() * scaled;

    let fitted = x * &beta;
    let resid = &yv - &fitted;
    let ssr = resid.norm_squared();
    let df = n - k;
    let s2 = ssr / df as f64;

    // (X'X)^{-1} = V diag(1/s^2) V'
    let v = v_t.transpose();
    let inv_diag: Vec<f64> =
        (0..k).map(|j| (0..k).map(|i| v[(j, i)].powi(2) / svd.singular_values[i].powi(2)).sum()).collect();

    let tdist = StudentsT::new(0.0, 1.0, df as f64).ok();
    let coefficients = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let se = (s2 * inv_diag[j]).sqrt();
            let t = beta[j] / se;
            let p = match &tdist {
                Some(d) if t.is_finite() => 2.0 * (1.0 - d.cdf(t.abs())),
                _ if t.is_infinite() => 0.0,
                _ => f64::NAN,
            };
            Coefficient { name, estimate: beta[j], std_error: se, t_stat: t, p_value: p }
        })
        .collect();

    let sst = if centered_r2 {
        let m = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { f64::NAN };

    Ok(OlsFit {
        coefficients,
        r_squared,
        ssr,
        n,
        df_resid: df,
        condition_number: condition,
        residuals: resid.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
    })
}
