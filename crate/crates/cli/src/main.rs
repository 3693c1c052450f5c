mod commands;
mod config;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pricext_core::{Convention, ErrorKind, Frequency, Leverage};

use crate::config::{ConfigError, RunConfig};
use crate::report::Reporter;
use crate::simulate::SimArgs;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "PRICEXT_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "pricext", version, about = "Return decomposition into potential maximum gain and loss")]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags override the config file field by field.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Monthly (or quarterly) OHLC bars.
    #[arg(long, global = true)]
    bars: Option<PathBuf>,
    #[arg(long, global = true)]
    bars_frequency: Option<Frequency>,
    /// Daily OHLC bars for the technical indicators.
    #[arg(long, global = true)]
    daily: Option<PathBuf>,
    /// Predictor table (yyyymm plus one column per predictor; TBL is the risk-free rate).
    #[arg(long, global = true)]
    predictors: Option<PathBuf>,
    #[arg(long, global = true)]
    sentiment: Option<PathBuf>,
    /// Analysis frequency.
    #[arg(long, global = true)]
    frequency: Option<Frequency>,
    #[arg(long, global = true)]
    convention: Option<Convention>,
    #[arg(long, global = true)]
    start: Option<String>,
    #[arg(long, global = true)]
    end: Option<String>,
    /// ARMA-GARCH candidate `l,m,p,q`; repeat for a grid.
    #[arg(long = "spec", global = true)]
    specs: Vec<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    lags: Option<Vec<usize>>,
    #[arg(long, global = true)]
    var_max_order: Option<usize>,
    /// In-sample windows `start..end`.
    #[arg(long, global = true, value_delimiter = ',')]
    subsamples: Option<Vec<String>>,
    /// Out-of-sample split dates.
    #[arg(long, global = true, value_delimiter = ',')]
    splits: Option<Vec<String>>,
    #[arg(long, global = true)]
    leverage: Option<Leverage>,
    /// Relative risk aversion for the backtest.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    variance_window: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-period return components.
    Decompose,
    /// Summary statistics and correlations.
    Describe,
    /// ARMA-GARCH selection and filtering of sqrt(PMG), sqrt(PML).
    Fit,
    /// Granger causality between PMG and PML.
    Granger {
        /// Also test the ARMA-GARCH filtered series.
        #[arg(long)]
        filtered: bool,
    },
    /// VAR on PMG and PML with in-sample R² over horizons.
    Var,
    /// Out-of-sample forecasts and the portfolio backtest.
    Oos,
    /// Impact regressions with business-cycle, technical and sentiment controls.
    Controls,
    /// Synthetic-data oracles.
    Simulate(SimArgs),
    /// Every stage in order.
    All,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = &self.$field { $target = v.clone().into(); })*
            };
        }
        set! {
            bars => c.bars,
            daily => c.daily,
            predictors => c.predictors,
            sentiment => c.sentiment,
            bars_frequency => c.bars_frequency,
            frequency => c.frequency,
            convention => c.convention,
            start => c.start,
            end => c.end,
            lags => c.granger_lags,
            var_max_order => c.var_max_order,
            subsamples => c.subsamples,
            splits => c.splits,
            leverage => c.leverage,
            gamma => c.backtest.gamma,
            variance_window => c.backtest.variance_window,
            seed => c.seed,
        }
        if !self.specs.is_empty() {
            c.grid = self.specs.clone();
        }
        // flag, then config file, then environment, then the fixed default
        if let Some(d) = &self.out_dir {
            c.out_dir = Some(d.clone());
        }
        Ok(c)
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"))
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.opts.resolve()?;
    cfg.validate()?;
    let dir = out_dir(&cfg);
    let name = match &cli.command {
        Command::Simulate(a) => format!("simulate {}", a.kind),
        other => format!("{other:?}").split_whitespace().next().unwrap_or_default().to_lowercase(),
    };
    let mut rep = Reporter::new(&dir, &cfg, &name)?;
    match &cli.command {
        Command::Simulate(args) => return simulate::run(args, &cfg, &mut rep),
        Command::Decompose => {
            let p = commands::prepare(&cfg)?;
            commands::decompose_report(&p, &mut rep)?;
        }
        Command::Describe => {
            let p = commands::prepare(&cfg)?;
            commands::describe(&p, &mut rep)?;
        }
        Command::Fit => {
            let p = commands::prepare(&cfg)?;
            let f = commands::fit_filters(&cfg, &p)?;
            commands::fit_report(&p, &f, &mut rep)?;
        }
        Command::Granger { filtered } => {
            let p = commands::prepare(&cfg)?;
            commands::granger(&cfg, &p.d.pmg, &p.d.pml, "raw", &mut rep)?;
            if *filtered {
                let f = commands::fit_filters(&cfg, &p)?;
                commands::granger(&cfg, &f.pmg_f, &f.pml_f, "filtered", &mut rep)?;
            }
        }
        Command::Var => {
            let p = commands::prepare(&cfg)?;
            commands::var_report(&cfg, &p, &mut rep)?;
        }
        Command::Oos => {
            let p = commands::prepare(&cfg)?;
            commands::oos_report(&cfg, &p, &mut rep)?;
        }
        Command::Controls => {
            let p = commands::prepare(&cfg)?;
            let f = commands::fit_filters(&cfg, &p)?;
            commands::controls_report(&cfg, &p, &f, &mut rep)?;
        }
        Command::All => {
            let p = commands::prepare(&cfg)?;
            commands::decompose_report(&p, &mut rep)?;
            commands::describe(&p, &mut rep)?;
            let f = commands::fit_filters(&cfg, &p)?;
            commands::fit_report(&p, &f, &mut rep)?;
            commands::granger(&cfg, &p.d.pmg, &p.d.pml, "raw", &mut rep)?;
            commands::granger(&cfg, &f.pmg_f, &f.pml_f, "filtered", &mut rep)?;
            commands::var_report(&cfg, &p, &mut rep)?;
            commands::oos_report(&cfg, &p, &mut rep)?;
            commands::controls_report(&cfg, &p, &f, &mut rep)?;
        }
    }
    Ok(())
}

/// 1 data, 2 numerical, 3 config. The first classified cause wins.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<pricext_core::Error>() {
            return match e.kind() {
                ErrorKind::Data => 1,
                ErrorKind::Numerical => 2,
                ErrorKind::Config => 3,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let level = match (cli.opts.quiet, cli.opts.verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
