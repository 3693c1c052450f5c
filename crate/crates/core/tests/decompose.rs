use approx::assert_abs_diff_eq;
use chrono::NaiveDate;
use pricext_core::decompose::{covariance_decomposition, decompose, overnight_share};
use pricext_core::market_data::OhlcBar;
use pricext_core::sim::{normal_draws, seeded_rng};
use pricext_core::{BarSeries, Convention, Frequency};

fn series(rows: &[(f64, f64, f64, f64)]) -> BarSeries {
    let bars = rows
        .iter()
        .enumerate()
        .map(|(i, &(o, h, l, c))| {
            let d = NaiveDate::from_ymd_opt(1990 + (i / 12) as i32, (i % 12) as u32 + 1, 1).unwrap();
            OhlcBar::new(Frequency::Monthly.period_end(d), o, h, l, c).unwrap()
        })
        .collect();
    BarSeries::new(Frequency::Monthly, bars).unwrap()
}

/// Random walk bars with intra-period extremes.
fn random_bars(seed: u64, n: usize) -> BarSeries {
    let z = normal_draws(&mut seeded_rng(seed), 4 * n);
    let mut c = 100.0;
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let o: f64 = c * (0.005 * z[4 * i]).exp();
            let close = o * (0.04 * z[4 * i + 1]).exp();
            let h = o.max(close) * (0.02 * z[4 * i + 2].abs()).exp();
            let l = o.min(close) * (-0.02 * z[4 * i + 3].abs()).exp();
            c = close;
            (o, h, l, close)
        })
        .collect();
    series(&rows)
}

#[test]
fn hand_evaluated_bar() {
    let d = decompose(&series(&[(100.0, 100.0, 100.0, 100.0), (100.0, 110.0, 99.0, 105.0)]), Convention::HighExtreme)
        .unwrap();
    assert_eq!(d.len(), 1);
    assert_abs_diff_eq!(d.ovr[0], 0.0);
    assert_abs_diff_eq!(d.pmg[0], 1.1f64.ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(d.pml[0], (110.0f64 / 105.0).ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(d.pmg[0], 0.09531, epsilon = 1e-5);
    assert_abs_diff_eq!(d.pml[0], 0.04652, epsilon = 1e-5);
    assert_abs_diff_eq!(d.r[0], 0.04879, epsilon = 1e-5);
}

#[test]
fn flat_bar_is_zero() {
    let d = decompose(&series(&[(50.0, 52.0, 49.0, 51.0), (51.0, 51.0, 50.0, 51.0)]), Convention::HighExtreme).unwrap();
    assert_eq!((d.pmg[0], d.pml[0], d.r[0]), (0.0, 0.0, 0.0));
}

#[test]
fn low_convention_legs() {
    let d = decompose(&series(&[(100.0, 100.0, 100.0, 100.0), (102.0, 110.0, 95.0, 105.0)]), Convention::LowExtreme)
        .unwrap();
    assert_abs_diff_eq!(d.pmg[0], (105.0f64 / 95.0).ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(d.pml[0], (102.0f64 / 95.0).ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(d.ovr[0], 1.02f64.ln(), epsilon = 1e-15);
}

#[test]
fn overnight_share_without_gaps_is_identity() {
    // open equals the previous close everywhere
    let mut rows = vec![(100.0, 101.0, 99.0, 100.5)];
    for k in 1..20 {
        let o: f64 = rows[k - 1].3;
        let c = o * (1.0 + 0.01 * ((k * 7 % 5) as f64 - 2.0));
        rows.push((o, o.max(c) + 0.5, o.min(c) - 0.5, c));
    }
    let fit = overnight_share(&decompose(&series(&rows), Convention::HighExtreme).unwrap()).unwrap();
    assert_abs_diff_eq!(fit.coef("r").unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
}

#[test]
fn overnight_share_exact_linear() {
    let bars = random_bars(3, 40);
    let mut d = decompose(&bars, Convention::HighExtreme).unwrap();
    d.r_full = d.r.iter().map(|v| 0.5 + 2.0 * v).collect();
    let fit = overnight_share(&d).unwrap();
    assert_abs_diff_eq!(fit.coef("r").unwrap(), 2.0, epsilon = 1e-10);
    assert_abs_diff_eq!(fit.coef("const").unwrap(), 0.5, epsilon = 1e-10);
    assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
}

#[test]
fn covariance_terms_match_loops() {
    let d = decompose(&random_bars(11, 120), Convention::HighExtreme).unwrap();
    let lag = 2;
    let brute = |a: &[f64], b: &[f64]| {
        let n = a.len() - lag;
        let ma = a[lag..].iter().sum::<f64>() / n as f64;
        let mb = b[..n].iter().sum::<f64>() / n as f64;
        let mut s = 0.0;
        for t in lag..a.len() {
            s += (a[t] - ma) * (b[t - lag] - mb);
        }
        s / n as f64
    };
    let c = covariance_decomposition(&d, lag).unwrap();
    assert_abs_diff_eq!(c.pmg_pmg, brute(&d.pmg, &d.pmg), epsilon = 1e-15);
    assert_abs_diff_eq!(c.pml_pml, brute(&d.pml, &d.pml), epsilon = 1e-15);
    assert_abs_diff_eq!(c.pmg_pml, brute(&d.pmg, &d.pml), epsilon = 1e-15);
    assert_abs_diff_eq!(c.pml_pmg, brute(&d.pml, &d.pmg), epsilon = 1e-15);
    assert_abs_diff_eq!(c.combined, brute(&d.r, &d.r), epsilon = 1e-10);
}

#[test]
fn equal_legs_cancel() {
    let mut d = decompose(&random_bars(5, 60), Convention::HighExtreme).unwrap();
    d.pml = d.pmg.clone();
    d.r = vec![0.0; d.pmg.len()];
    let c = covariance_decomposition(&d, 1).unwrap();
    assert_abs_diff_eq!(c.combined, 0.0, epsilon = 1e-18);
}

#[test]
fn lag_out_of_range() {
    let d = decompose(&random_bars(1, 10), Convention::HighExtreme).unwrap();
    assert!(covariance_decomposition(&d, 9).is_err());
    assert!(covariance_decomposition(&d, 0).is_err());
}
