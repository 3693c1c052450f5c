//! Report files. Every file opens with the same header block: config hash,
//! dataset hashes and the modelling switches in effect. Nothing time- or
//! host-dependent goes in, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use crate::config::{dataset_hashes, RunConfig};

pub struct Reporter {
    dir: PathBuf,
    header: Vec<(String, String)>,
    pub written: Vec<PathBuf>,
}

impl Reporter {
    pub fn new(dir: &Path, cfg: &RunConfig, command: &str) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut header = vec![
            ("tool".to_string(), format!("pricext {}", env!("CARGO_PKG_VERSION"))),
            ("command".to_string(), command.to_string()),
            ("config_sha256".to_string(), cfg.hash()),
        ];
        for (name, hash) in dataset_hashes(cfg)? {
            header.push((format!("dataset_sha256.{name}"), hash));
        }
        header.extend(switches(cfg));
        Ok(Reporter { dir: dir.to_path_buf(), header, written: Vec::new() })
    }

    fn header_block(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            writeln!(s, "# {k}: {v}").unwrap();
        }
        s
    }

    fn write(&mut self, name: &str, body: String) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    pub fn tsv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
        let mut body = self.header_block();
        body.push_str(&columns.join("\t"));
        body.push('\n');
        for r in rows {
            body.push_str(&r.join("\t"));
            body.push('\n');
        }
        self.write(name, body)
    }

    /// Comma-separated file with the header block as `#` comments.
    pub fn csv(&mut self, name: &str, content: &[u8]) -> anyhow::Result<()> {
        let mut body = self.header_block();
        body.push_str(std::str::from_utf8(content).context("ledger is not UTF-8")?);
        self.write(name, body)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> anyhow::Result<()> {
        let header: serde_json::Map<String, serde_json::Value> =
            self.header.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({ "header": header, "body": body });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write(name, text)
    }
}

fn switches(cfg: &RunConfig) -> Vec<(String, String)> {
    [
        ("frequency", cfg.frequency.to_string()),
        ("convention", cfg.convention.to_string()),
        ("arch_in_mean_leverage", cfg.leverage.to_string()),
        ("arch_in_mean_presample_indicator", "expectation 0.5".into()),
        ("arma_garch_presample", "y at sample mean, shocks 0, variance from preliminary ARMA residuals".into()),
        ("filter_input", "square root of PMG and PML".into()),
        ("var_levels", "raw PMG and PML".into()),
        ("var_order_selection", "SIC on common sample, chosen order refit on its own sample".into()),
        ("benchmark_mean", "expanding mean through t-1".into()),
        ("oos_mode", "static: coefficients frozen at split".into()),
        ("risk_free", "TBL / periods per year".into()),
        ("portfolio_variance", "rolling sample variance, divisor n-1".into()),
        ("skewness_indicator", "moment skewness of trailing daily log returns".into()),
        ("seed", cfg.seed.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Fixed-format number: six decimals, scientific below 1e-3.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NA".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.4e}")
    } else {
        format!("{x:.6}")
    }
}

/// p-value with four decimals.
pub fn pval(p: f64) -> String {
    if p.is_nan() {
        "NA".into()
    } else {
        format!("{p:.4}")
    }
}
