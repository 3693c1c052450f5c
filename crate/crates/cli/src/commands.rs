//! Pipeline stages behind each subcommand. Each stage writes its reports and
//! returns what later stages need.

use anyhow::{Context, Result};
use chrono::NaiveDate;
use pricext_core::forecast::{evaluate_oos_at, fit_arch_in_mean, fit_var};
use pricext_core::inference::{
    build_indicators, control_regression, granger_test_named, impact_regression, state_dependent_mri, Control,
};
use pricext_core::market_data::{load_bars, load_predictors, to_quarterly};
use pricext_core::portfolio::{risk_free_per_period, run_backtest};
use pricext_core::stats::{correlation_matrix, summarize, SummaryStats};
use pricext_core::ts_filter::{filtered, select_detailed, sqrt_transform, Selection};
use pricext_core::{
    decompose, overnight_share, ArchInMeanFit, BarSeries, DecomposedSeries, Frequency, IndicatorSeries, OlsFit,
    PredictorTable, VarFit,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{config_error, RunConfig};
use crate::report::{num, pval, Reporter};

const ACF_LAGS: [usize; 5] = [1, 3, 6, 9, 12];
const Q_LAG: usize = 12;

pub struct Prepared {
    pub bars: BarSeries,
    pub d: DecomposedSeries,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let path = cfg.bars_path()?;
    let raw =
        load_bars(path, cfg.bars_frequency).with_context(|| format!("market_data: loading {}", path.display()))?;
    let (from, to) = cfg.date_range()?;
    let raw = raw.slice_dates(from, to);
    let bars = if cfg.frequency == Frequency::Quarterly && raw.frequency() == Frequency::Monthly {
        to_quarterly(&raw).context("market_data: building quarterly bars")?
    } else {
        raw
    };
    let d = decompose(&bars, cfg.convention).context("decompose")?;
    log::info!("{} {} bars, {} decomposed periods", bars.len(), bars.frequency(), d.len());
    Ok(Prepared { bars, d })
}

fn date_strings(freq: Frequency, dates: &[NaiveDate]) -> Vec<String> {
    dates.iter().map(|d| freq.format_date(*d)).collect()
}

pub fn decompose_report(p: &Prepared, rep: &mut Reporter) -> Result<()> {
    let d = &p.d;
    let dates = date_strings(d.frequency, &d.dates);
    let rows: Vec<Vec<String>> = (0..d.len())
        .map(|t| vec![dates[t].clone(), num(d.r_full[t]), num(d.r[t]), num(d.ovr[t]), num(d.pmg[t]), num(d.pml[t])])
        .collect();
    rep.tsv("decomposed.tsv", &["date", "r_full", "r", "ovr", "pmg", "pml"], &rows)
}

fn summary_rows(cols: &[(&str, SummaryStats)]) -> Vec<Vec<String>> {
    let row = |label: &str, f: &dyn Fn(&SummaryStats) -> String| {
        let mut r = vec![label.to_string()];
        r.extend(cols.iter().map(|(_, s)| f(s)));
        r
    };
    let mut rows = vec![
        row("mean", &|s| num(s.mean)),
        row("std_dev", &|s| num(s.std_dev)),
        row("max", &|s| num(s.max)),
        row("min", &|s| num(s.min)),
        row("skewness", &|s| num(s.skewness)),
        row("kurtosis", &|s| num(s.kurtosis)),
        row("jarque_bera", &|s| num(s.jarque_bera)),
        row("jb_p", &|s| pval(s.jb_pvalue)),
    ];
    for (k, lag) in ACF_LAGS.iter().enumerate() {
        rows.push(row(&format!("acf({lag})"), &|s| num(s.acf[k].1)));
    }
    rows.push(row(&format!("q({Q_LAG})"), &|s| num(s.ljung_box_q)));
    rows.push(row("q_p", &|s| pval(s.ljung_box_pvalue)));
    rows.push(row("obs", &|s| s.n.to_string()));
    rows
}

fn fit_json(f: &OlsFit) -> Value {
    json!({
        "coefficients": f.coefficients.iter().map(|c| json!({
            "name": c.name, "estimate": c.estimate, "std_error": c.std_error, "t": c.t_stat, "p": c.p_value,
        })).collect::<Vec<_>>(),
        "r_squared": f.r_squared,
        "n": f.n,
    })
}

pub fn describe(p: &Prepared, rep: &mut Reporter) -> Result<Value> {
    let d = &p.d;
    let stats = |x: &[f64], what: &str| summarize(x, &ACF_LAGS, Q_LAG).with_context(|| format!("desc_stats: {what}"));
    let cols = [("r", stats(&d.r, "r")?), ("PMG", stats(&d.pmg, "PMG")?), ("PML", stats(&d.pml, "PML")?)];
    rep.tsv("table1_summary.tsv", &["statistic", "r", "PMG", "PML"], &summary_rows(&cols))?;

    let names = ["r_full", "r", "PMG", "PML"];
    let corr = correlation_matrix(&[&d.r_full, &d.r, &d.pmg, &d.pml]).context("desc_stats: correlation")?;
    let mut rows = Vec::new();
    for i in 0..4 {
        for j in 0..i {
            rows.push(vec![names[i].into(), names[j].into(), num(corr.corr[i][j]), pval(corr.p_values[i][j])]);
        }
    }
    rep.tsv("table2_correlation.tsv", &["a", "b", "corr", "p"], &rows)?;

    let share = overnight_share(d).context("decompose: overnight share regression")?;
    let body = json!({
        "summary": cols.iter().map(|(n, s)| (n.to_string(), json!(s))).collect::<serde_json::Map<_, _>>(),
        "correlation": corr,
        "overnight_regression": fit_json(&share),
    });
    rep.json("describe.json", &body)?;
    Ok(body)
}

pub struct Filters {
    pub pmg: Selection,
    pub pml: Selection,
    pub pmg_f: Vec<f64>,
    pub pml_f: Vec<f64>,
}

pub fn fit_filters(cfg: &RunConfig, p: &Prepared) -> Result<Filters> {
    let grid = cfg.grid()?;
    let run = |x: &[f64], what: &str| -> Result<Selection> {
        let y = sqrt_transform(x).with_context(|| format!("ts_filter: sqrt of {what}"))?;
        select_detailed(&y, &grid).with_context(|| format!("ts_filter: selecting model for sqrt({what})"))
    };
    let (pmg, pml) = rayon::join(|| run(&p.d.pmg, "PMG"), || run(&p.d.pml, "PML"));
    let (pmg, pml) = (pmg?, pml?);
    let pmg_f = filtered(&pmg.best).context("ts_filter: filtering PMG")?;
    let pml_f = filtered(&pml.best).context("ts_filter: filtering PML")?;
    Ok(Filters { pmg, pml, pmg_f, pml_f })
}

/// Conventional table labels put alpha on lagged variance and beta on lagged squared
/// shocks; stored names say which is which.
fn table_label(param: &str) -> String {
    match param {
        "mu" => "c".into(),
        "omega" => "omega".into(),
        "sigma2" => "sigma^2".into(),
        p if p.starts_with("garch") => format!("alpha{}", &p[5..]),
        p if p.starts_with("arch") => format!("beta{}", &p[4..]),
        p if p.starts_with("ar") => format!("phi{}", &p[2..]),
        p if p.starts_with("ma") => format!("theta{}", &p[2..]),
        p => p.into(),
    }
}

pub fn fit_report(p: &Prepared, f: &Filters, rep: &mut Reporter) -> Result<Value> {
    let mut params = Vec::new();
    let mut summary = Vec::new();
    let mut candidates = Vec::new();
    let mut body = serde_json::Map::new();
    for (name, sel) in [("sqrt_PMG", &f.pmg), ("sqrt_PML", &f.pml)] {
        let b = &sel.best;
        for (k, pn) in b.param_names.iter().enumerate() {
            let (est, se) = (b.estimates()[k], b.std_errors[k]);
            params.push(vec![
                name.into(),
                b.spec.to_string(),
                pn.clone(),
                table_label(pn),
                num(est),
                num(se),
                num(est / se),
            ]);
        }
        summary.push(vec![
            name.into(),
            b.spec.to_string(),
            b.n.to_string(),
            num(b.log_likelihood),
            num(b.aic),
            num(b.r_squared),
            format!("{:?}", b.convergence),
            b.iterations.to_string(),
        ]);
        for (spec, res) in &sel.candidates {
            let aic = match res {
                Ok(a) => num(*a),
                Err(e) => format!("error: {e}"),
            };
            candidates.push(vec![name.into(), spec.to_string(), aic]);
        }
        body.insert(
            name.into(),
            json!({
                "spec": b.spec.to_string(),
                "params": b.params,
                "param_names": b.param_names,
                "std_errors": b.std_errors,
                "log_likelihood": b.log_likelihood,
                "aic": b.aic,
                "r_squared": b.r_squared,
                "convergence": b.convergence,
                "presample_variance": b.presample_variance,
            }),
        );
    }
    rep.tsv(
        "table3_arma_garch.tsv",
        &["series", "spec", "param", "label", "estimate", "se_inverse_hessian", "t"],
        &params,
    )?;
    rep.tsv(
        "table3_fit_summary.tsv",
        &["series", "spec", "n", "log_likelihood", "aic", "r_squared", "convergence", "iterations"],
        &summary,
    )?;
    rep.tsv("table3_candidates.tsv", &["series", "spec", "aic"], &candidates)?;

    let stats = |x: &[f64], what: &str| summarize(x, &ACF_LAGS, Q_LAG).with_context(|| format!("desc_stats: {what}"));
    let cols = [("PMG_F", stats(&f.pmg_f, "filtered PMG")?), ("PML_F", stats(&f.pml_f, "filtered PML")?)];
    rep.tsv("table4_filtered_summary.tsv", &["statistic", "PMG_F", "PML_F"], &summary_rows(&cols))?;

    let dates = date_strings(p.d.frequency, &p.d.dates);
    let rows: Vec<Vec<String>> =
        (0..p.d.len()).map(|t| vec![dates[t].clone(), num(f.pmg_f[t]), num(f.pml_f[t])]).collect();
    rep.tsv("filtered.tsv", &["date", "pmg_f", "pml_f"], &rows)?;

    let body = Value::Object(body);
    rep.json("fit.json", &body)?;
    Ok(body)
}

pub fn granger(cfg: &RunConfig, pmg: &[f64], pml: &[f64], label: &str, rep: &mut Reporter) -> Result<Value> {
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &lag in &cfg.granger_lags {
        for (cause, effect, x, y) in [("PML", "PMG", pml, pmg), ("PMG", "PML", pmg, pml)] {
            let g = granger_test_named(x, y, lag, cause, effect)
                .with_context(|| format!("inference: granger {cause} -> {effect}, lag {lag}"))?;
            rows.push(vec![
                label.into(),
                format!("{cause} does not Granger-cause {effect}"),
                lag.to_string(),
                num(g.f_stat),
                pval(g.p_value),
                g.n.to_string(),
                g.df_num.to_string(),
                g.df_den.to_string(),
            ]);
            results.push(g);
        }
    }
    let table = match cfg.convention {
        pricext_core::Convention::HighExtreme => "table5",
        pricext_core::Convention::LowExtreme => "table6",
    };
    rep.tsv(
        &format!("{table}_granger_{label}.tsv"),
        &["input", "null", "lag", "f", "p", "n", "df_num", "df_den"],
        &rows,
    )?;

    let mut impact_rows = Vec::new();
    let mut impact = Vec::new();
    for (effect, cause, chi, psi) in [("PMG", "PML", pmg, pml), ("PML", "PMG", pml, pmg)] {
        let f = impact_regression(chi, psi, 1).with_context(|| format!("inference: impact of {cause} on {effect}"))?;
        for c in &f.coefficients {
            impact_rows.push(vec![
                label.into(),
                effect.into(),
                if c.name == "lagged" { format!("{cause}(t-1)") } else { c.name.clone() },
                num(c.estimate),
                num(c.std_error),
                num(c.t_stat),
                pval(c.p_value),
                num(f.r_squared),
            ]);
        }
        impact.push(json!({ "effect": effect, "cause": cause, "fit": fit_json(&f) }));
    }
    rep.tsv(
        &format!("impact_regression_{label}.tsv"),
        &["input", "dependent", "term", "estimate", "std_error", "t", "p", "r_squared"],
        &impact_rows,
    )?;
    let body = json!({ "granger": results, "impact": impact });
    rep.json(&format!("granger_{label}.json"), &body)?;
    Ok(body)
}

fn span_label(d: &DecomposedSeries) -> String {
    format!("{}..{}", d.frequency.format_date(d.dates[0]), d.frequency.format_date(*d.dates.last().unwrap()))
}

/// In-sample horizons: each configured window clipped to the data, then the
/// full sample. Windows with no observations are skipped.
fn horizons(cfg: &RunConfig, d: &DecomposedSeries) -> Result<Vec<(String, DecomposedSeries)>> {
    let mut out = Vec::new();
    for (a, b) in cfg.subsample_ranges()? {
        let sub = d.slice_dates(Some(a), Some(b));
        if sub.is_empty() {
            log::warn!("subsample {}..{} has no observations", d.frequency.format_date(a), d.frequency.format_date(b));
            continue;
        }
        out.push((span_label(&sub), sub));
    }
    out.push((span_label(d), d.clone()));
    Ok(out)
}

struct HorizonFit {
    label: String,
    var: VarFit,
    archm: ArchInMeanFit,
}

pub fn var_report(cfg: &RunConfig, p: &Prepared, rep: &mut Reporter) -> Result<Value> {
    let d = &p.d;
    // quarterly returns are modelled with constant variance
    let constant_variance = d.frequency == Frequency::Quarterly;
    let fits: Vec<Result<HorizonFit>> = horizons(cfg, d)?
        .into_par_iter()
        .map(|(label, sub)| {
            let var = fit_var(&sub.pmg, &sub.pml, cfg.var_max_order)
                .with_context(|| format!("forecast: VAR over {label}"))?;
            let archm = fit_arch_in_mean(&sub.r_full, constant_variance, cfg.leverage)
                .with_context(|| format!("forecast: ARCH-in-mean over {label}"))?;
            Ok(HorizonFit { label, var, archm })
        })
        .collect();
    let fits = fits.into_iter().collect::<Result<Vec<_>>>()?;

    let mut coef_rows = Vec::new();
    let mut sic_rows = Vec::new();
    let mut r2_rows = Vec::new();
    for h in &fits {
        let names = h.var.coefficient_names();
        for (eq, e) in [("PMG", &h.var.pmg_eq), ("PML", &h.var.pml_eq)] {
            for (k, n) in names.iter().enumerate() {
                coef_rows.push(vec![
                    h.label.clone(),
                    h.var.q.to_string(),
                    eq.into(),
                    n.clone(),
                    num(e.coef[k]),
                    num(e.std_errors[k]),
                    num(e.t_stats[k]),
                ]);
            }
            coef_rows.push(vec![
                h.label.clone(),
                h.var.q.to_string(),
                eq.into(),
                "r_squared".into(),
                num(e.r_squared),
                String::new(),
                String::new(),
            ]);
        }
        for (q, s) in &h.var.sic_by_order {
            sic_rows.push(vec![h.label.clone(), q.to_string(), num(*s), (*q == h.var.q).to_string()]);
        }
        r2_rows.push(vec![
            h.label.clone(),
            h.var.q.to_string(),
            num(100.0 * h.var.return_r_squared),
            num(100.0 * h.archm.r_squared),
            num(h.var.return_r_squared / h.archm.r_squared),
        ]);
    }
    rep.tsv("table7_var.tsv", &["horizon", "q", "equation", "term", "estimate", "std_error", "t"], &coef_rows)?;
    rep.tsv("table7_sic.tsv", &["horizon", "q", "sic", "selected"], &sic_rows)?;
    rep.tsv(
        "table8_r2.tsv",
        &["horizon", "var_q", "var_r2_pct", "arch_in_mean_r2_pct", "predictability_ratio"],
        &r2_rows,
    )?;

    let body: Vec<Value> = fits
        .iter()
        .map(|h| {
            json!({
                "horizon": h.label,
                "var": h.var,
                "coefficient_names": h.var.coefficient_names(),
                "arch_in_mean": {
                    "param_names": h.archm.param_names(),
                    "delta": h.archm.delta,
                    "omega": h.archm.omega,
                    "std_errors": h.archm.std_errors,
                    "log_likelihood": h.archm.log_likelihood,
                    "r_squared": h.archm.r_squared,
                    "constant_variance": h.archm.constant_variance,
                    "leverage": h.archm.leverage,
                    "convergence": h.archm.convergence,
                    "n": h.archm.n,
                },
            })
        })
        .collect();
    let body = Value::Array(body);
    rep.json("var.json", &body)?;
    Ok(body)
}

fn load_table(path: &std::path::Path, bars: &BarSeries, what: &str) -> Result<PredictorTable> {
    load_predictors(path, bars).with_context(|| format!("market_data: loading {what} {}", path.display()))
}

pub fn oos_report(cfg: &RunConfig, p: &Prepared, rep: &mut Reporter) -> Result<Value> {
    let d = &p.d;
    let rf = match &cfg.predictors {
        Some(path) => {
            let table = load_table(path, &p.bars, "predictors")?;
            let tbl = table
                .get("TBL")
                .ok_or_else(|| config_error("predictor file has no TBL column for the risk-free rate"))?;
            let aligned = tbl.aligned_to(&d.dates);
            Some(risk_free_per_period(&aligned, d.frequency, &d.dates).context("portfolio: risk-free rate")?)
        }
        None => {
            log::warn!("no predictor file: portfolio columns left empty");
            None
        }
    };
    let bt = cfg.backtest_config();
    let splits = cfg.split_dates()?;
    let evals: Vec<Result<_>> = splits
        .par_iter()
        .map(|s| {
            let label = d.frequency.format_date(*s);
            let eval =
                evaluate_oos_at(d, *s, cfg.var_max_order).with_context(|| format!("forecast: OOS split {label}"))?;
            let report = rf
                .as_ref()
                .map(|rf| run_backtest(&d.r, rf, &eval, &bt))
                .transpose()
                .with_context(|| format!("portfolio: backtest from {label}"))?;
            Ok((label, eval, report))
        })
        .collect();
    let mut rows = Vec::new();
    let mut body = Vec::new();
    for e in evals {
        let (label, eval, report) = e?;
        let last = d.frequency.format_date(*d.dates.last().unwrap());
        let mut dump = String::from("date,r,r_mean,r_var_forecast\n");
        for (k, date) in d.dates[eval.split..].iter().enumerate() {
            dump.push_str(&format!(
                "{},{},{},{}\n",
                d.frequency.format_date(*date),
                eval.actual[k],
                eval.benchmark[k],
                eval.forecasts[k]
            ));
        }
        rep.csv(&format!("table9_forecasts_{label}.csv"), dump.as_bytes())?;
        let mut row = vec![
            format!("{label}..{last}"),
            eval.actual.len().to_string(),
            eval.q.to_string(),
            num(100.0 * eval.r2_oos),
            num(eval.clark_west.statistic),
            pval(eval.clark_west.p_value),
        ];
        match &report {
            Some(r) => {
                row.extend([
                    num(r.cer_gain),
                    num(r.sharpe_model),
                    num(r.sharpe_bench),
                    num(r.sharpe_buy_hold),
                    r.clamped_model.to_string(),
                    r.clamped_bench.to_string(),
                ]);
                let mut buf = Vec::new();
                let dates = date_strings(d.frequency, &d.dates[eval.split..]);
                r.write_ledger(&mut buf, &dates)?;
                rep.csv(&format!("table9_ledger_{label}.csv"), &buf)?;
            }
            None => row.extend(std::iter::repeat_n("NA".to_string(), 6)),
        }
        rows.push(row);
        body.push(json!({
            "horizon": format!("{label}..{last}"),
            "q": eval.q,
            "r2_oos": eval.r2_oos,
            "clark_west": { "statistic": eval.clark_west.statistic, "p_value": eval.clark_west.p_value, "mean_f": eval.clark_west.mean_f },
            "backtest": report.as_ref().map(|r| json!({
                "cer_gain": r.cer_gain, "nu_model": r.nu_model, "nu_bench": r.nu_bench,
                "sharpe_model": r.sharpe_model, "sharpe_bench": r.sharpe_bench, "sharpe_buy_hold": r.sharpe_buy_hold,
                "clamped_model": r.clamped_model, "clamped_bench": r.clamped_bench, "config": r.config,
            })),
        }));
    }
    rep.tsv(
        "table9_oos.tsv",
        &[
            "horizon",
            "n_oos",
            "var_q",
            "r2_oos_pct",
            "cw_stat",
            "cw_p",
            "cer_gain",
            "sharpe_model",
            "sharpe_bench",
            "sharpe_buy_hold",
            "clamped_model",
            "clamped_bench",
        ],
        &rows,
    )?;
    let body = Value::Array(body);
    rep.json("oos.json", &body)?;
    Ok(body)
}

struct ControlSet {
    label: String,
    controls: Vec<Control>,
}

fn regression_rows(f: &Filters, sets: &[ControlSet]) -> Result<(Vec<Vec<String>>, Vec<Value>)> {
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for s in sets {
        let res = control_regression(&f.pmg_f, &f.pml_f, &s.controls, true)
            .with_context(|| format!("inference: control regression `{}`", s.label))?;
        for c in &res.fit.coefficients {
            rows.push(vec![
                s.label.clone(),
                if c.name == "lagged" { "PML_F(t)".into() } else { c.name.clone() },
                num(c.estimate),
                num(c.std_error),
                num(c.t_stat),
                pval(c.p_value),
                res.fit.n.to_string(),
                num(res.fit.r_squared),
            ]);
        }
        out.push(json!({
            "controls": s.label,
            "fit": fit_json(&res.fit),
            "rows_dropped": res.rows_dropped,
            "dropped_controls": res.dropped_controls,
        }));
    }
    Ok((rows, out))
}

const CONTROL_COLUMNS: [&str; 8] = ["controls", "term", "estimate", "std_error", "t", "p", "n", "r_squared"];

pub fn controls_report(cfg: &RunConfig, p: &Prepared, f: &Filters, rep: &mut Reporter) -> Result<Value> {
    let d = &p.d;
    let mut body = serde_json::Map::new();

    let emit = |name: &str,
                sets: Vec<ControlSet>,
                rep: &mut Reporter,
                body: &mut serde_json::Map<String, Value>|
     -> Result<()> {
        let (rows, js) = regression_rows(f, &sets)?;
        rep.tsv(&format!("{name}.tsv"), &CONTROL_COLUMNS, &rows)?;
        body.insert(name.to_string(), Value::Array(js));
        Ok(())
    };

    if let Some(path) = &cfg.predictors {
        let table = load_table(path, &p.bars, "predictors")?;
        let mut sets = vec![ControlSet { label: "none".into(), controls: vec![] }];
        for s in &table.series {
            sets.push(ControlSet { label: s.name.clone(), controls: vec![Control::from_predictor(s, &d.dates)] });
        }
        let name = match d.frequency {
            Frequency::Quarterly => "table13_business_cycle",
            _ => "table12_business_cycle",
        };
        emit(name, sets, rep, &mut body)?;
    } else {
        log::warn!("no predictor file: business-cycle controls skipped");
    }

    if let Some(path) = &cfg.daily {
        let daily = load_bars(path, Frequency::Daily)
            .with_context(|| format!("market_data: loading daily bars {}", path.display()))?;
        let ind = build_indicators(&daily, &d.dates, d.frequency).context("inference: building indicators")?;
        let mut dump = format!("date,{}\n", ind.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(","));
        let aligned: Vec<Control> = ind.iter().map(|s| Control::from_indicator(s, &d.dates)).collect();
        for (t, date) in d.dates.iter().enumerate() {
            dump.push_str(&d.frequency.format_date(*date));
            for c in &aligned {
                dump.push(',');
                if let Some(v) = c.values[t] {
                    dump.push_str(&v.to_string());
                }
            }
            dump.push('\n');
        }
        rep.csv("indicators.csv", dump.as_bytes())?;
        let get = |n: &str| -> &IndicatorSeries { ind.iter().find(|s| s.name == n).expect("indicator present") };
        let ctl = |n: &str| Control::from_indicator(get(n), &d.dates);
        let (good, bad) = state_dependent_mri(&ctl("I_MA"), &ctl("MRI"))?;
        emit(
            "table14_mri_ima",
            vec![
                ControlSet { label: "none".into(), controls: vec![] },
                ControlSet { label: "MRI".into(), controls: vec![ctl("MRI")] },
                ControlSet { label: "I_MA".into(), controls: vec![ctl("I_MA")] },
                ControlSet { label: "MRI+I_MA".into(), controls: vec![ctl("MRI"), ctl("I_MA")] },
                ControlSet { label: "state_dependent_MRI".into(), controls: vec![good, bad] },
            ],
            rep,
            &mut body,
        )?;
        emit(
            "table15_highs",
            vec![
                ControlSet { label: "none".into(), controls: vec![] },
                ControlSet { label: "H52".into(), controls: vec![ctl("H52")] },
                ControlSet { label: "Hmax".into(), controls: vec![ctl("Hmax")] },
                ControlSet { label: "H52+Hmax".into(), controls: vec![ctl("H52"), ctl("Hmax")] },
            ],
            rep,
            &mut body,
        )?;
        emit(
            "table17_skewness",
            vec![
                ControlSet { label: "none".into(), controls: vec![] },
                ControlSet { label: "SK".into(), controls: vec![ctl("SK")] },
            ],
            rep,
            &mut body,
        )?;
        let starts: serde_json::Map<String, Value> =
            ind.iter().map(|s| (s.name.clone(), json!(s.start.map(|x| d.frequency.format_date(x))))).collect();
        body.insert("indicator_start".into(), Value::Object(starts));
    } else {
        log::warn!("no daily file: indicator controls skipped");
    }

    if let Some(path) = &cfg.sentiment {
        let table = load_table(path, &p.bars, "sentiment")?;
        let mut sets = vec![ControlSet { label: "none".into(), controls: vec![] }];
        for s in &table.series {
            sets.push(ControlSet { label: s.name.clone(), controls: vec![Control::from_predictor(s, &d.dates)] });
        }
        emit("table16_sentiment", sets, rep, &mut body)?;
    } else {
        log::warn!("no sentiment file: sentiment controls skipped");
    }

    let body = Value::Object(body);
    rep.json("controls.json", &body)?;
    Ok(body)
}
