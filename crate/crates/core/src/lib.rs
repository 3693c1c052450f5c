//! Decomposition of asset returns into potential maximum gain (PMG) and
//! potential maximum loss (PML) from OHLC bars, with the estimators used to
//! study their dynamics and forecasting value.
//!
//! ```
//! use pricext_core::{decompose, BarSeries, Convention, Frequency, OhlcBar};
//! use chrono::NaiveDate;
//!
//! let d = |m| NaiveDate::from_ymd_opt(2000, m, 1).unwrap();
//! let f = Frequency::Monthly;
//! let bars = vec![
//!     OhlcBar::new(f.period_end(d(1)), 99.0, 101.0, 98.0, 100.0).unwrap(),
//!     OhlcBar::new(f.period_end(d(2)), 100.0, 110.0, 99.0, 105.0).unwrap(),
//! ];
//! let series = BarSeries::new(f, bars).unwrap();
//! let out = decompose(&series, Convention::HighExtreme).unwrap();
//! assert!((out.pmg[0] - 1.1f64.ln()).abs() < 1e-15);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decompose;
pub mod error;
pub mod forecast;
pub mod inference;
pub mod market_data;
pub mod ols;
pub mod optim;
pub mod portfolio;
pub mod sim;
pub mod stats;
pub mod ts_filter;

pub use decompose::{
    covariance_decomposition, decompose, overnight_share, Convention, CovarianceDecomposition, DecomposedSeries,
};
pub use error::{Error, ErrorKind, Result};
pub use forecast::{
    clark_west, evaluate_oos, fit_arch_in_mean, fit_var, fit_var_order, r2_oos, ArchInMeanFit, ForecastMode, Leverage,
    OosEvaluation, VarFit,
};
pub use inference::{
    build_indicators, control_regression, granger_test, impact_regression, ControlRegression, GrangerResult,
    IndicatorSeries,
};
pub use market_data::{
    load_bars, load_predictors, to_quarterly, BarSeries, Frequency, OhlcBar, PredictorSeries, PredictorTable,
};
pub use ols::{Coefficient, Ols, OlsFit};
pub use portfolio::{rolling_variance, run_backtest, BacktestConfig, BacktestReport};
pub use stats::{correlation_matrix, standardize, summarize, CorrelationMatrix, SummaryStats};
pub use ts_filter::{ArmaGarchFit, ArmaGarchSpec, Convergence};
