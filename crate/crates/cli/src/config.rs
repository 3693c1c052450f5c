//! Run configuration: a TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::NaiveDate;
use pricext_core::portfolio::BacktestConfig;
use pricext_core::ts_filter::ArmaGarchSpec;
use pricext_core::{Convention, Frequency, Leverage};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Invalid configuration; maps to exit code 3.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestSection {
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
    /// Defaults to ten years of periods.
    pub variance_window: Option<usize>,
    /// Defaults to `100 * periods_per_year`.
    pub annualization: Option<f64>,
}

impl Default for BacktestSection {
    fn default() -> Self {
        let d = BacktestConfig::default();
        BacktestSection { gamma: d.gamma, lower: d.lower, upper: d.upper, variance_window: None, annualization: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bars: Option<PathBuf>,
    /// Frequency of the rows in `bars`.
    pub bars_frequency: Frequency,
    pub daily: Option<PathBuf>,
    pub predictors: Option<PathBuf>,
    pub sentiment: Option<PathBuf>,
    /// Analysis frequency; monthly bars are aggregated when this is quarterly.
    pub frequency: Frequency,
    pub convention: Convention,
    pub start: Option<String>,
    pub end: Option<String>,
    /// `"l,m,p,q"` entries; empty means the built-in grid.
    pub grid: Vec<String>,
    pub granger_lags: Vec<usize>,
    pub var_max_order: usize,
    /// In-sample windows `"start..end"`, reported alongside the full sample.
    pub subsamples: Vec<String>,
    /// Out-of-sample start dates.
    pub splits: Vec<String>,
    pub leverage: Leverage,
    pub backtest: BacktestSection,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bars: None,
            bars_frequency: Frequency::Monthly,
            daily: None,
            predictors: None,
            sentiment: None,
            frequency: Frequency::Monthly,
            convention: Convention::HighExtreme,
            start: None,
            end: None,
            grid: Vec::new(),
            granger_lags: vec![2, 4, 6],
            var_max_order: 6,
            subsamples: vec!["1950-01..1985-12".into(), "1986-01..2015-12".into()],
            splits: vec!["1971-01".into(), "1989-01".into(), "1996-01".into()],
            leverage: Leverage::default(),
            backtest: BacktestSection::default(),
            out_dir: None,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for (what, p) in [
            ("bars", &self.bars),
            ("daily", &self.daily),
            ("predictors", &self.predictors),
            ("sentiment", &self.sentiment),
        ] {
            if let Some(p) = p {
                if !p.exists() {
                    bail!(config_error(format!("{what} file {} does not exist", p.display())));
                }
            }
        }
        if self.granger_lags.is_empty() || self.granger_lags.contains(&0) {
            bail!(config_error("granger lag set must be non-empty and positive"));
        }
        if self.var_max_order == 0 {
            bail!(config_error("var_max_order must be positive"));
        }
        if self.frequency == Frequency::Daily {
            bail!(config_error("analysis frequency must be monthly or quarterly"));
        }
        if self.frequency == Frequency::Monthly && self.bars_frequency == Frequency::Quarterly {
            bail!(config_error("cannot analyse quarterly bars at monthly frequency"));
        }
        self.grid()?;
        self.split_dates()?;
        self.subsample_ranges()?;
        self.date_range()?;
        self.backtest_config().validate().map_err(|e| config_error(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> anyhow::Result<Vec<ArmaGarchSpec>> {
        if self.grid.is_empty() {
            return Ok(ArmaGarchSpec::default_grid());
        }
        self.grid
            .iter()
            .map(|s| s.parse::<ArmaGarchSpec>().map_err(|e| config_error(format!("grid entry `{s}`: {e}"))))
            .collect()
    }

    pub fn split_dates(&self) -> anyhow::Result<Vec<NaiveDate>> {
        self.splits
            .iter()
            .map(|s| self.frequency.parse_date(s).ok_or_else(|| config_error(format!("cannot parse split date `{s}`"))))
            .collect()
    }

    pub fn subsample_ranges(&self) -> anyhow::Result<Vec<(NaiveDate, NaiveDate)>> {
        self.subsamples
            .iter()
            .map(|s| {
                let bad = || config_error(format!("subsample `{s}` is not `start..end`"));
                let (a, b) = s.split_once("..").ok_or_else(bad)?;
                let a = self.frequency.parse_date(a).ok_or_else(bad)?;
                let b = self.frequency.parse_date(b).ok_or_else(bad)?;
                if a >= b {
                    return Err(bad());
                }
                Ok((a, b))
            })
            .collect()
    }

    pub fn date_range(&self) -> anyhow::Result<(Option<NaiveDate>, Option<NaiveDate>)> {
        let parse = |s: &Option<String>| -> anyhow::Result<Option<NaiveDate>> {
            s.as_deref()
                .map(|t| {
                    self.bars_frequency.parse_date(t).ok_or_else(|| config_error(format!("cannot parse date `{t}`")))
                })
                .transpose()
        };
        Ok((parse(&self.start)?, parse(&self.end)?))
    }

    pub fn backtest_config(&self) -> BacktestConfig {
        let base = BacktestConfig::for_frequency(self.frequency);
        BacktestConfig {
            gamma: self.backtest.gamma,
            lower: self.backtest.lower,
            upper: self.backtest.upper,
            variance_window: self.backtest.variance_window.unwrap_or(base.variance_window),
            annualization: self.backtest.annualization.unwrap_or(base.annualization),
        }
    }

    pub fn bars_path(&self) -> anyhow::Result<&Path> {
        self.bars.as_deref().ok_or_else(|| config_error("no bars file given (--bars or `bars` in config)"))
    }

    /// SHA-256 of the canonical JSON form, ignoring the output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = None;
        let json = serde_json::to_vec(&c).expect("config serialises");
        hex::encode(Sha256::digest(&json))
    }
}

/// SHA-256 of each input file, in a fixed order.
pub fn dataset_hashes(cfg: &RunConfig) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (what, p) in
        [("bars", &cfg.bars), ("daily", &cfg.daily), ("predictors", &cfg.predictors), ("sentiment", &cfg.sentiment)]
    {
        if let Some(p) = p {
            let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            out.push((what.to_string(), hex::encode(Sha256::digest(&bytes))));
        }
    }
    Ok(out)
}
