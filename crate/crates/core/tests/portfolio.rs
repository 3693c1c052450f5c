use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use pricext_core::forecast::evaluate_oos_at;
use pricext_core::market_data::{load_bars, load_predictors};
use pricext_core::portfolio::{backtest, risk_free_per_period, rolling_variance, run_backtest, BacktestConfig};
use pricext_core::sim::{normal_draws, seeded_rng};
use pricext_core::{decompose, Convention, Frequency};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn rolling_variance_matches_loops() {
    let r = normal_draws(&mut seeded_rng(1), 300);
    let v = rolling_variance(&r, 120).unwrap();
    assert_eq!(v.len(), 181);
    for (k, got) in v.iter().enumerate() {
        let w = &r[k..k + 120];
        let m = w.iter().sum::<f64>() / 120.0;
        let brute = w.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 119.0;
        assert_abs_diff_eq!(*got, brute, epsilon = 1e-14);
    }
}

#[test]
fn constant_returns_hit_bounds() {
    let r = vec![0.01; 40];
    let rf = vec![0.001; 40];
    let cfg = BacktestConfig { variance_window: 20, ..Default::default() };
    let rep = backtest(&r, &rf, 20, &[0.02; 20], &[0.0; 20], &cfg).unwrap();
    assert!(rep.weights_bench.iter().all(|w| *w == 1.5));
    assert!(rep.weights_model.iter().all(|w| *w == 0.0));
    assert_eq!(rep.clamped_bench, 20);
}

#[test]
fn identical_forecasts_identical_paths() {
    let r: Vec<f64> = normal_draws(&mut seeded_rng(2), 200).iter().map(|z| 0.006 + 0.04 * z).collect();
    let rf = vec![0.003; 200];
    let f: Vec<f64> = (150..200).map(|t| r[..t].iter().sum::<f64>() / t as f64).collect();
    let rep = backtest(&r, &rf, 150, &f, &f, &BacktestConfig::default()).unwrap();
    assert_eq!(rep.cer_gain, 0.0);
    assert_eq!(rep.weights_model, rep.weights_bench);
    assert_eq!(rep.sharpe_model, rep.sharpe_bench);
}

#[test]
fn risk_free_conversion() {
    let dates =
        vec![Frequency::Monthly.parse_date("2000-01").unwrap(), Frequency::Monthly.parse_date("2000-02").unwrap()];
    let rf = risk_free_per_period(&[Some(0.06), Some(0.012)], Frequency::Monthly, &dates).unwrap();
    assert_abs_diff_eq!(rf[0], 0.005, epsilon = 1e-18);
    assert_abs_diff_eq!(rf[1], 0.001, epsilon = 1e-18);
    assert!(risk_free_per_period(&[Some(0.06), None], Frequency::Monthly, &dates).is_err());
}

#[test]
fn fixture_pipeline_backtest() {
    let bars = load_bars(data("monthly_ohlc.csv"), Frequency::Monthly).unwrap();
    let preds = load_predictors(data("predictors.csv"), &bars).unwrap();
    let d = decompose(&bars, Convention::HighExtreme).unwrap();
    let eval = evaluate_oos_at(&d, Frequency::Monthly.parse_date("1971-01").unwrap(), 6).unwrap();
    let tbl = preds.get("TBL").unwrap().aligned_to(&d.dates);
    let rf = risk_free_per_period(&tbl, Frequency::Monthly, &d.dates).unwrap();
    let rep = run_backtest(&d.r, &rf, &eval, &BacktestConfig::default()).unwrap();
    assert_eq!(rep.weights_model.len(), d.len() - eval.split);
    assert!(rep.weights_model.iter().chain(&rep.weights_bench).all(|w| (0.0..=1.5).contains(w)));
    assert_eq!(rep.r2_oos, Some(eval.r2_oos));
    assert_eq!(rep.cer_gain, 1200.0 * (rep.nu_model - rep.nu_bench));

    let mut out = Vec::new();
    let dates: Vec<String> = d.dates[eval.split..].iter().map(|x| Frequency::Monthly.format_date(*x)).collect();
    rep.write_ledger(&mut out, &dates).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("date,weight_bench,weight_model,ret_bench,ret_model,rf\n1971-01,"));
    assert_eq!(text.lines().count(), rep.weights_model.len() + 1);
}

#[test]
fn bad_config_rejected() {
    let r = vec![0.01, 0.02, 0.0, 0.01];
    let cfg = BacktestConfig { variance_window: 2, gamma: -1.0, ..Default::default() };
    assert!(backtest(&r, &[0.0; 4], 2, &[0.0; 2], &[0.0; 2], &cfg).is_err());
    let cfg = BacktestConfig { variance_window: 3, ..Default::default() };
    assert!(backtest(&r, &[0.0; 4], 2, &[0.0; 2], &[0.0; 2], &cfg).is_err());
}
