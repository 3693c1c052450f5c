use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use pricext_core::forecast::{
    clark_west, evaluate_oos, evaluate_oos_at, expanding_mean, fit_arch_in_mean, fit_var, fit_var_order,
    forecast_returns, r2_oos, ForecastMode, Leverage,
};
use pricext_core::market_data::load_bars;
use pricext_core::ols::Ols;
use pricext_core::sim::{normal_draws, seeded_rng, simulate_var1};
use pricext_core::{decompose, Convention, Frequency};

const A: [[f64; 2]; 2] = [[0.3, 0.2], [0.1, 0.4]];

fn fixture() -> pricext_core::DecomposedSeries {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/monthly_ohlc.csv");
    decompose(&load_bars(path, Frequency::Monthly).unwrap(), Convention::HighExtreme).unwrap()
}

#[test]
fn var1_recovery_and_order_selection() {
    let seeds = 50;
    let (mut coef_ok, mut order_ok) = (0, 0);
    for seed in 0..seeds {
        let (g, l) = simulate_var1([0.02, 0.01], A, [0.01, 0.01], 5000, 500, &mut seeded_rng(seed));
        let sel = fit_var(&g, &l, 4).unwrap();
        order_ok += (sel.q == 1) as u64;
        let f = fit_var_order(&g, &l, 1).unwrap();
        // coefficient layout: const, pmg lag, pml lag
        let est = [f.pmg_eq.coef[1], f.pmg_eq.coef[2], f.pml_eq.coef[1], f.pml_eq.coef[2]];
        let truth = [A[0][0], A[0][1], A[1][0], A[1][1]];
        coef_ok += est.iter().zip(truth).all(|(e, t)| (e - t).abs() <= 0.05) as u64;
    }
    assert!(coef_ok * 10 >= seeds * 9, "coefficients {coef_ok}/{seeds}");
    assert!(order_ok * 10 >= seeds * 9, "order {order_ok}/{seeds}");
}

#[test]
fn hand_built_var1_forecasts() {
    let g = [0.03, 0.05, 0.02, 0.04, 0.06, 0.01, 0.03, 0.02];
    let l = [0.02, 0.01, 0.04, 0.03, 0.02, 0.05, 0.01, 0.03];
    let mut fit = fit_var_order(&g, &l, 1).unwrap();
    fit.pmg_eq.coef = vec![0.01, 0.5, 0.2];
    fit.pml_eq.coef = vec![0.02, -0.1, 0.3];
    let got = forecast_returns(&fit, &g, &l, ForecastMode::StaticOos { start: 3 }).unwrap();
    for (k, t) in (3..8).enumerate() {
        let pg = 0.01 + 0.5 * g[t - 1] + 0.2 * l[t - 1];
        let pl = 0.02 - 0.1 * g[t - 1] + 0.3 * l[t - 1];
        assert_abs_diff_eq!(got[k], pg - pl, epsilon = 1e-16);
    }
    let ins = forecast_returns(&fit, &g, &l, ForecastMode::InSample).unwrap();
    assert_eq!(ins.len(), 7);
}

/// `r_t = d0 + d1 r_{t-1} + e_t` with GARCH(1,1) errors and no risk premium.
fn simulate_ar_garch(seed: u64, n: usize) -> Vec<f64> {
    let z = normal_draws(&mut seeded_rng(seed), n + 500);
    let (w0, w1, w2) = (1e-5, 0.85, 0.1);
    let mut h2 = w0 / (1.0 - w1 - w2);
    let mut e_prev: f64 = 0.0;
    let mut r_prev = 0.006;
    let mut out = Vec::with_capacity(n);
    for (t, zt) in z.iter().enumerate() {
        h2 = w0 + w1 * h2 + w2 * e_prev * e_prev;
        let e = h2.sqrt() * zt;
        let r = 0.005 + 0.1 * r_prev + e;
        if t >= 500 {
            out.push(r);
        }
        e_prev = e;
        r_prev = r;
    }
    out
}

#[test]
fn arch_in_mean_premium_insignificant_under_null() {
    let seeds = 50;
    let mut insignificant = 0;
    for seed in 0..seeds {
        let r = simulate_ar_garch(700 + seed, 1000);
        let f = fit_arch_in_mean(&r, false, Leverage::default()).unwrap();
        let t = f.delta[2] / f.std_errors[2];
        insignificant += (t.abs() < 1.96 || !t.is_finite()) as u64;
    }
    assert!(insignificant * 10 >= seeds * 9, "{insignificant}/{seeds}");
}

#[test]
fn constant_variance_arch_in_mean_is_ar1() {
    let r = simulate_ar_garch(3, 400);
    let f = fit_arch_in_mean(&r, true, Leverage::default()).unwrap();
    let ols = Ols::new(&r[1..]).intercept().regressor("lag", &r[..r.len() - 1]).fit().unwrap();
    assert_abs_diff_eq!(f.delta[0], ols.coef("const").unwrap(), epsilon = 1e-10);
    assert_abs_diff_eq!(f.delta[1], ols.coef("lag").unwrap(), epsilon = 1e-10);
    assert_eq!(f.delta[2], 0.0);
    assert_eq!(f.param_names(), vec!["delta0", "delta1", "sigma2"]);
}

#[test]
fn as_written_leverage_fits() {
    let r = simulate_ar_garch(4, 600);
    let f = fit_arch_in_mean(&r, false, Leverage::AsWritten).unwrap();
    assert!(f.log_likelihood.is_finite());
    assert!(f.conditional_variance.iter().all(|v| *v > 0.0));
    assert_eq!(f.n, 599);
}

#[test]
fn identical_and_perfect_forecasts() {
    let r = normal_draws(&mut seeded_rng(8), 30);
    let m = expanding_mean(&r, 10);
    let actual = &r[10..];
    assert_eq!(r2_oos(actual, &m, &m).unwrap(), 0.0);
    let cw = clark_west(actual, &m, &m).unwrap();
    assert!(cw.f.iter().all(|v| *v == 0.0));
    assert_eq!(cw.statistic, 0.0);
    assert_eq!(r2_oos(actual, &m, actual).unwrap(), 1.0);
}

#[test]
fn expanding_mean_has_no_look_ahead() {
    let r = [1.0, 2.0, 3.0, 4.0, 100.0];
    assert_eq!(expanding_mean(&r, 2), vec![1.5, 2.0, 2.5]);
}

#[test]
fn oos_on_fixture_is_deterministic() {
    let d = fixture();
    let split = Frequency::Monthly.parse_date("1971-01").unwrap();
    let a = evaluate_oos_at(&d, split, 6).unwrap();
    let b = evaluate_oos_at(&d, split, 6).unwrap();
    assert_eq!(a, b);
    assert_eq!(d.dates[a.split], split);
    assert_eq!(a.forecasts.len(), d.len() - a.split);
    assert_abs_diff_eq!(a.benchmark[0], d.r[..a.split].iter().sum::<f64>() / a.split as f64, epsilon = 1e-15);
}

#[test]
fn short_training_window_rejected() {
    let d = fixture();
    assert!(evaluate_oos(&d.pmg, &d.pml, &d.r, 100, 6, 120).is_err());
    assert!(evaluate_oos(&d.pmg, &d.pml, &d.r, d.len(), 6, 120).is_err());
}
