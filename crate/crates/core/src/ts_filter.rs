//! ARMA(l, m)-GARCH(p, q) quasi-maximum-likelihood filtering.
//!
//! Mean equation
//! `y_t = mu + sum_i phi_i y_{t-i} + sum_j theta_j e_{t-j} + e_t`,
//! variance equation
//! `s2_t = omega + garch * s2_{t-1} + arch * e_{t-1}^2`, Gaussian innovations.
//!
//! The likelihood is conditional: pre-sample observations are set to the
//! sample mean, pre-sample shocks to zero, and the pre-sample variance (and
//! squared shock) to the residual variance of a preliminary least-squares
//! ARMA pass. Every observation contributes to the likelihood, so the
//! residual series has the same length as the input.
//!
//! Optimisation runs on unconstrained coordinates: partial autocorrelations
//! through `tanh` keep the AR part stationary and the MA part invertible,
//! `exp` keeps `omega` positive, and a persistence/share pair of logistic
//! maps keeps `arch + garch < 1`.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::fit_matrix;
use crate::optim::{minimize, numeric_hessian, OptimOptions};
use crate::stats::{mean, standardize, variance};

const LN_2PI: f64 = 1.837_877_066_409_345_3;
const MIN_OBS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArmaGarchSpec {
    /// AR order `l`.
    pub ar: usize,
    /// MA order `m`.
    pub ma: usize,
    /// Lagged-variance order `p`.
    pub garch: usize,
    /// Lagged-squared-shock order `q`.
    pub arch: usize,
}

impl ArmaGarchSpec {
    pub fn new(ar: usize, ma: usize, garch: usize, arch: usize) -> Result<Self> {
        let spec = ArmaGarchSpec { ar, ma, garch, arch };
        spec.validate()?;
        Ok(spec)
    }

    pub fn arma(ar: usize, ma: usize) -> Self {
        ArmaGarchSpec { ar, ma, garch: 0, arch: 0 }
    }

    pub fn arma_garch(ar: usize, ma: usize) -> Self {
        ArmaGarchSpec { ar, ma, garch: 1, arch: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ar > 2 || self.ma > 2 {
            return Err(Error::InvalidSpec(format!("ARMA orders must be within 0..=2, got {self}")));
        }
        if self.garch > 1 || self.arch > 1 || self.garch != self.arch {
            return Err(Error::InvalidSpec(format!("GARCH orders must be jointly 0 or jointly 1, got {self}")));
        }
        Ok(())
    }

    /// No GARCH dynamics; a single constant innovation variance.
    pub fn constant_variance(&self) -> bool {
        self.garch == 0
    }

    /// Number of free parameters.
    pub fn n_params(&self) -> usize {
        1 + self.ar + self.ma + if self.constant_variance() { 1 } else { 3 }
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names = vec!["mu".to_string()];
        names.extend((1..=self.ar).map(|i| format!("ar{i}")));
        names.extend((1..=self.ma).map(|j| format!("ma{j}")));
        if self.constant_variance() {
            names.push("sigma2".into());
        } else {
            names.extend(["omega".into(), "garch1".into(), "arch1".into()]);
        }
        names
    }

    /// AR and MA orders 0..=2 crossed with {GARCH(1,1), constant variance}.
    pub fn default_grid() -> Vec<ArmaGarchSpec> {
        let mut grid = Vec::new();
        for ar in 0..=2 {
            for ma in 0..=2 {
                grid.push(ArmaGarchSpec::arma_garch(ar, ma));
                grid.push(ArmaGarchSpec::arma(ar, ma));
            }
        }
        grid
    }
}

impl fmt::Display for ArmaGarchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARMA({},{})", self.ar, self.ma)?;
        if !self.constant_variance() {
            write!(f, "-GARCH({},{})", self.garch, self.arch)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ArmaGarchSpec {
    type Err = Error;

    /// Parses `l,m,p,q`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("bad spec `{s}`: {e}")))?;
        match parts.as_slice() {
            [l, m, p, q] => ArmaGarchSpec::new(*l, *m, *p, *q),
            _ => Err(Error::Config(format!("spec `{s}` must have four comma-separated orders"))),
        }
    }
}

/// Model parameters in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaGarchParams {
    pub mu: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub variance: VarianceParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarianceParams {
    Constant { sigma2: f64 },
    Garch { omega: f64, garch_coef: f64, arch_coef: f64 },
}

impl ArmaGarchParams {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.mu];
        v.extend(&self.ar);
        v.extend(&self.ma);
        match self.variance {
            VarianceParams::Constant { sigma2 } => v.push(sigma2),
            VarianceParams::Garch { omega, garch_coef, arch_coef } => v.extend([omega, garch_coef, arch_coef]),
        }
        v
    }

    pub fn from_vec(spec: &ArmaGarchSpec, v: &[f64]) -> Self {
        let mut it = v.iter().copied();
        let mu = it.next().unwrap_or(0.0);
        let ar = it.by_ref().take(spec.ar).collect();
        let ma = it.by_ref().take(spec.ma).collect();
        let variance = if spec.constant_variance() {
            VarianceParams::Constant { sigma2: it.next().unwrap_or(f64::NAN) }
        } else {
            VarianceParams::Garch {
                omega: it.next().unwrap_or(f64::NAN),
                garch_coef: it.next().unwrap_or(f64::NAN),
                arch_coef: it.next().unwrap_or(f64::NAN),
            }
        };
        ArmaGarchParams { mu, ar, ma, variance }
    }

    /// Positivity, covariance stationarity, AR stationarity and MA invertibility.
    pub fn is_admissible(&self) -> bool {
        let var_ok = match self.variance {
            VarianceParams::Constant { sigma2 } => sigma2 > 0.0,
            VarianceParams::Garch { omega, garch_coef, arch_coef } => {
                omega > 0.0 && garch_coef >= 0.0 && arch_coef >= 0.0 && garch_coef + arch_coef < 1.0
            }
        };
        let neg_ma: Vec<f64> = self.ma.iter().map(|t| -t).collect();
        var_ok
            && self.mu.is_finite()
            && ar_to_pacf(&self.ar).is_some_and(|r| r.iter().all(|v| v.abs() < 1.0))
            && ar_to_pacf(&neg_ma).is_some_and(|r| r.iter().all(|v| v.abs() < 1.0))
    }
}

/// Partial autocorrelations to AR coefficients (Durbin-Levinson).
fn pacf_to_ar(r: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(r.len());
    for (k, &rk) in r.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - rk * prev[k - 1 - j];
        }
        phi.push(rk);
    }
    phi
}

/// Inverse of [`pacf_to_ar`]; `None` when the recursion breaks down.
fn ar_to_pacf(phi: &[f64]) -> Option<Vec<f64>> {
    let p = phi.len();
    let mut cur = phi.to_vec();
    let mut r = vec![0.0; p];
    for k in (0..p).rev() {
        let rk = cur[k];
        r[k] = rk;
        if k == 0 {
            break;
        }
        let denom = 1.0 - rk * rk;
        if denom.abs() < 1e-14 {
            return None;
        }
        let prev: Vec<f64> = (0..k).map(|j| (cur[j] + rk * cur[k - 1 - j]) / denom).collect();
        cur = prev;
    }
    Some(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Converged,
    MaxIter,
    Boundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmaGarchFit {
    pub spec: ArmaGarchSpec,
    pub params: ArmaGarchParams,
    pub param_names: Vec<String>,
    /// Inverse-Hessian standard errors, `NaN` where the Hessian is not
    /// positive definite.
    pub std_errors: Vec<f64>,
    pub log_likelihood: f64,
    pub log_likelihood_start: f64,
    pub aic: f64,
    pub r_squared: f64,
    pub n: usize,
    pub convergence: Convergence,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub conditional_variance: Vec<f64>,
    pub standardized_residuals: Vec<f64>,
    /// Pre-sample variance used to start the recursion.
    pub presample_variance: f64,
}

impl ArmaGarchFit {
    pub fn estimates(&self) -> Vec<f64> {
        self.params.to_vec()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        let i = self.param_names.iter().position(|n| n == name)?;
        Some(self.estimates()[i])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        let i = self.param_names.iter().position(|n| n == name)?;
        self.std_errors.get(i).copied()
    }
}

/// Data-derived constants shared by every likelihood evaluation.
#[derive(Debug, Clone, Copy)]
struct Anchor {
    ybar: f64,
    scale: f64,
    presample_var: f64,
}

struct Path {
    loglik: f64,
    residuals: Vec<f64>,
    variance: Vec<f64>,
}

fn recursion(y: &[f64], p: &ArmaGarchParams, anchor: &Anchor, keep: bool) -> Path {
    let n = y.len();
    let (l, m) = (p.ar.len(), p.ma.len());
    let mut resid = vec![0.0; n];
    let mut var_path = if keep { vec![0.0; n] } else { Vec::new() };
    let mut loglik = 0.0;
    let (mut s2_prev, mut e2_prev) = (anchor.presample_var, anchor.presample_var);
    for t in 0..n {
        let mut fit = p.mu;
        for i in 0..l {
            fit += p.ar[i] * if t > i { y[t - 1 - i] } else { anchor.ybar };
        }
        for j in 0..m {
            if t > j {
                fit += p.ma[j] * resid[t - 1 - j];
            }
        }
        let e = y[t] - fit;
        resid[t] = e;
        let s2 = match p.variance {
            VarianceParams::Constant { sigma2 } => sigma2,
            VarianceParams::Garch { omega, garch_coef, arch_coef } => {
                omega + garch_coef * s2_prev + arch_coef * e2_prev
            }
        };
        loglik -= 0.5 * (LN_2PI + s2.ln() + e * e / s2);
        if keep {
            var_path[t] = s2;
        }
        s2_prev = s2;
        e2_prev = e * e;
    }
    Path { loglik, residuals: resid, variance: var_path }
}

/// Gaussian conditional log-likelihood; `-inf` for inadmissible parameters.
fn loglik(y: &[f64], p: &ArmaGarchParams, anchor: &Anchor) -> f64 {
    if !p.is_admissible() {
        return f64::NEG_INFINITY;
    }
    let ll = recursion(y, p, anchor, false).loglik;
    if ll.is_nan() {
        f64::NEG_INFINITY
    } else {
        ll
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates <-> natural parameters. The location and scale
/// of the data are factored out so the optimiser sees O(1) quantities.
fn from_unconstrained(spec: &ArmaGarchSpec, z: &[f64], a: &Anchor) -> ArmaGarchParams {
    let mut it = z.iter().copied();
    let mu_tilde = it.next().unwrap_or(0.0);
    let ar = pacf_to_ar(&it.by_ref().take(spec.ar).map(f64::tanh).collect::<Vec<_>>());
    let ma: Vec<f64> =
        pacf_to_ar(&it.by_ref().take(spec.ma).map(f64::tanh).collect::<Vec<_>>()).into_iter().map(|v| -v).collect();
    let s2 = a.scale * a.scale;
    let variance = if spec.constant_variance() {
        VarianceParams::Constant { sigma2: s2 * it.next().unwrap_or(0.0).exp() }
    } else {
        let omega = s2 * it.next().unwrap_or(0.0).exp();
        let persistence = logistic(it.next().unwrap_or(0.0));
        let share = logistic(it.next().unwrap_or(0.0));
        VarianceParams::Garch { omega, garch_coef: persistence * (1.0 - share), arch_coef: persistence * share }
    };
    let ar_sum: f64 = ar.iter().sum();
    ArmaGarchParams { mu: a.ybar * (1.0 - ar_sum) + a.scale * mu_tilde, ar, ma, variance }
}

fn to_unconstrained(spec: &ArmaGarchSpec, p: &ArmaGarchParams, a: &Anchor) -> Vec<f64> {
    let clamp_atanh = |r: f64| r.clamp(-0.97, 0.97).atanh();
    let ar_sum: f64 = p.ar.iter().sum();
    let mut z = vec![(p.mu - a.ybar * (1.0 - ar_sum)) / a.scale];
    let r_ar = ar_to_pacf(&p.ar).unwrap_or_else(|| vec![0.0; spec.ar]);
    z.extend(r_ar.iter().map(|r| if r.is_finite() { clamp_atanh(*r) } else { 0.0 }));
    let neg_ma: Vec<f64> = p.ma.iter().map(|t| -t).collect();
    let r_ma = ar_to_pacf(&neg_ma).unwrap_or_else(|| vec![0.0; spec.ma]);
    z.extend(r_ma.iter().map(|r| if r.is_finite() { clamp_atanh(*r) } else { 0.0 }));
    let s2 = a.scale * a.scale;
    match p.variance {
        VarianceParams::Constant { sigma2 } => z.push((sigma2 / s2).ln()),
        VarianceParams::Garch { omega, garch_coef, arch_coef } => {
            let persistence = (garch_coef + arch_coef).clamp(0.01, 0.995);
            let share = (arch_coef / (garch_coef + arch_coef)).clamp(0.01, 0.99);
            z.extend([(omega / s2).ln(), logit(persistence), logit(share)]);
        }
    }
    z
}

/// Hannan-Rissanen style least-squares ARMA estimate: long AR to proxy the
/// shocks, then a regression on lagged levels and lagged proxies.
fn preliminary_arma(y: &[f64], ar: usize, ma: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let ybar = mean(y);
    if ar == 0 && ma == 0 {
        return (ybar, vec![], vec![]);
    }
    let n = y.len();
    let long = (ar + ma + 4).max(8).min(n / 5);
    let shocks = if ma > 0 {
        let rows = n - long;
        let x = DMatrix::from_fn(rows, long + 1, |i, j| if j == 0 { 1.0 } else { y[long + i - j] });
        match fit_matrix(&y[long..], &x, (0..=long).map(|j| j.to_string()).collect(), true) {
            Ok(fit) => {
                let mut e = vec![0.0; long];
                e.extend(fit.residuals);
                e
            }
            Err(_) => return (ybar, vec![0.0; ar], vec![0.0; ma]),
        }
    } else {
        vec![0.0; n]
    };
    let start = if ma > 0 { long + ma } else { ar };
    let start = start.max(ar);
    let rows = n - start;
    let k = 1 + ar + ma;
    let x = DMatrix::from_fn(rows, k, |i, j| {
        let t = start + i;
        if j == 0 {
            1.0
        } else if j <= ar {
            y[t - j]
        } else {
            shocks[t - (j - ar)]
        }
    });
    match fit_matrix(&y[start..], &x, (0..k).map(|j| j.to_string()).collect(), true) {
        Ok(fit) => {
            let b = fit.estimates();
            (b[0], b[1..=ar].to_vec(), b[ar + 1..].to_vec())
        }
        Err(_) => (ybar, vec![0.0; ar], vec![0.0; ma]),
    }
}

/// Element-wise square root of a non-negative series.
pub fn sqrt_transform(x: &[f64]) -> Result<Vec<f64>> {
    x.iter()
        .enumerate()
        .map(
            |(index, &value)| {
                if value < 0.0 || value.is_nan() {
                    Err(Error::NegativeInput { index, value })
                } else {
                    Ok(value.sqrt())
                }
            },
        )
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub optim: OptimOptions,
}

pub fn fit(y: &[f64], spec: ArmaGarchSpec) -> Result<ArmaGarchFit> {
    fit_with(y, spec, &FitOptions::default())
}

pub fn fit_with(y: &[f64], spec: ArmaGarchSpec, opts: &FitOptions) -> Result<ArmaGarchFit> {
    spec.validate()?;
    let n = y.len();
    if n < MIN_OBS {
        return Err(Error::InsufficientData { needed: MIN_OBS, got: n, context: "arma-garch fit" });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::MissingValue("non-finite observation in fit input".into()));
    }
    let ybar = mean(y);
    let var_y = variance(y, 0);
    if !(var_y > 0.0) {
        return Err(Error::ZeroVariance("arma-garch fit"));
    }

    // Preliminary least-squares pass: starting values and pre-sample variance.
    let (mu0, ar0, ma0) = preliminary_arma(y, spec.ar, spec.ma);
    let mut start = ArmaGarchParams { mu: mu0, ar: ar0, ma: ma0, variance: VarianceParams::Constant { sigma2: var_y } };
    let scale = var_y.sqrt();
    let probe = Anchor { ybar, scale, presample_var: var_y };
    let z_mean = to_unconstrained(&ArmaGarchSpec::arma(spec.ar, spec.ma), &start, &probe);
    start = from_unconstrained(&ArmaGarchSpec::arma(spec.ar, spec.ma), &z_mean, &probe);
    let prelim = recursion(y, &start, &probe, false);
    let resid_var = variance(&prelim.residuals, 0).max(1e-12 * var_y);
    let anchor = Anchor { ybar, scale, presample_var: resid_var };
    start.variance = if spec.constant_variance() {
        VarianceParams::Constant { sigma2: resid_var }
    } else {
        VarianceParams::Garch { omega: 0.1 * resid_var, garch_coef: 0.85, arch_coef: 0.05 }
    };

    let z0 = to_unconstrained(&spec, &start, &anchor);
    let objective = |z: &[f64]| -loglik(y, &from_unconstrained(&spec, z, &anchor), &anchor);
    let res = minimize(&objective, &z0, &opts.optim);
    let params = from_unconstrained(&spec, &res.x, &anchor);
    let path = recursion(y, &params, &anchor, true);

    let mut convergence = if res.converged { Convergence::Converged } else { Convergence::MaxIter };
    if convergence == Convergence::Converged && on_boundary(&params) {
        convergence = Convergence::Boundary;
    }

    let theta = params.to_vec();
    let nat = |v: &[f64]| -loglik(y, &ArmaGarchParams::from_vec(&spec, v), &anchor);
    let steps: Vec<f64> = theta
        .iter()
        .zip(spec.param_names())
        .map(|(v, name)| match name.as_str() {
            "omega" | "sigma2" => 1e-3 * v.abs(),
            _ => 1e-4 * v.abs().max(0.1),
        })
        .collect();
    let std_errors = inverse_diag(&numeric_hessian(&nat, &theta, &steps));

    let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let sse: f64 = path.residuals.iter().map(|e| e * e).sum();
    let standardized = path.residuals.iter().zip(&path.variance).map(|(e, s2)| e / s2.sqrt()).collect();

    Ok(ArmaGarchFit {
        spec,
        param_names: spec.param_names(),
        std_errors,
        log_likelihood: path.loglik,
        log_likelihood_start: -res.f_start,
        aic: -2.0 * path.loglik + 2.0 * spec.n_params() as f64,
        r_squared: 1.0 - sse / sst,
        n,
        convergence,
        iterations: res.iterations,
        residuals: path.residuals,
        conditional_variance: path.variance,
        standardized_residuals: standardized,
        presample_variance: resid_var,
        params,
    })
}

fn on_boundary(p: &ArmaGarchParams) -> bool {
    let neg_ma: Vec<f64> = p.ma.iter().map(|t| -t).collect();
    let near_unit = |v: &[f64]| ar_to_pacf(v).is_none_or(|r| r.iter().any(|x| x.abs() > 0.999));
    let var_edge = match p.variance {
        VarianceParams::Constant { .. } => false,
        VarianceParams::Garch { garch_coef, arch_coef, .. } => {
            garch_coef < 1e-4 || arch_coef < 1e-4 || garch_coef + arch_coef > 0.999
        }
    };
    var_edge || near_unit(&p.ar) || near_unit(&neg_ma)
}

fn inverse_diag(h: &[Vec<f64>]) -> Vec<f64> {
    let k = h.len();
    let m = DMatrix::from_fn(k, k, |i, j| h[i][j]);
    match m.cholesky() {
        Some(ch) => {
            let inv = ch.inverse();
            (0..k).map(|i| inv[(i, i)].sqrt()).collect()
        }
        None => vec![f64::NAN; k],
    }
}

/// Log-likelihood of `fit`'s model at arbitrary natural parameters, using the
/// same conditioning as the fit.
pub fn loglik_at(y: &[f64], fit: &ArmaGarchFit, params: &ArmaGarchParams) -> f64 {
    let anchor = Anchor { ybar: mean(y), scale: variance(y, 0).sqrt(), presample_var: fit.presample_variance };
    loglik(y, params, &anchor)
}

/// Local optimality check: perturbing any single parameter by `+-delta`
/// (natural units) must not raise the log-likelihood by more than `tol`.
/// Perturbations leaving the admissible region count as worse.
pub fn perturbation_check(y: &[f64], fit: &ArmaGarchFit, delta: f64, tol: f64) -> bool {
    let theta = fit.estimates();
    let base = loglik_at(y, fit, &fit.params);
    (0..theta.len()).all(|i| {
        [delta, -delta].iter().all(|d| {
            let mut v = theta.clone();
            v[i] += d;
            let ll = loglik_at(y, fit, &ArmaGarchParams::from_vec(&fit.spec, &v));
            !(ll > base + tol)
        })
    })
}

/// Outcome of a grid search.
#[derive(Debug, Clone)]
pub struct Selection {
    pub best: ArmaGarchFit,
    /// Every grid point with its AIC, or the error it raised.
    pub candidates: Vec<(ArmaGarchSpec, std::result::Result<f64, String>)>,
}

/// Fit every spec and keep the minimum-AIC fit among those that did not hit
/// the iteration limit. Ties go to fewer parameters, then to the smaller
/// `(l, m, p, q)` tuple.
pub fn select(y: &[f64], grid: &[ArmaGarchSpec]) -> Result<ArmaGarchFit> {
    select_detailed(y, grid).map(|s| s.best)
}

pub fn select_detailed(y: &[f64], grid: &[ArmaGarchSpec]) -> Result<Selection> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec("empty specification grid".into()));
    }
    let fits: Vec<Result<ArmaGarchFit>> = grid.par_iter().map(|s| fit(y, *s)).collect();
    let candidates = grid
        .iter()
        .zip(&fits)
        .map(|(s, f)| {
            (
                *s,
                match f {
                    Ok(f) => Ok(f.aic),
                    Err(e) => Err(e.to_string()),
                },
            )
        })
        .collect();
    let best = fits
        .into_iter()
        .filter_map(|f| f.ok())
        .filter(|f| f.convergence != Convergence::MaxIter && f.aic.is_finite())
        .min_by(|a, b| {
            a.aic.total_cmp(&b.aic).then(a.spec.n_params().cmp(&b.spec.n_params())).then(
                (a.spec.ar, a.spec.ma, a.spec.garch, a.spec.arch).cmp(&(
                    b.spec.ar,
                    b.spec.ma,
                    b.spec.garch,
                    b.spec.arch,
                )),
            )
        })
        .ok_or(Error::NoConvergence)?;
    Ok(Selection { best, candidates })
}

/// Standardised residuals re-standardised to exact sample mean 0 and
/// standard deviation 1.
pub fn filtered(fit: &ArmaGarchFit) -> Result<Vec<f64>> {
    standardize(&fit.standardized_residuals)
}
