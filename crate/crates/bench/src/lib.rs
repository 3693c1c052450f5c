//! Deterministic inputs for the benchmarks.

use chrono::NaiveDate;
use pricext_core::sim::{normal_draws, seeded_rng};
use pricext_core::{BarSeries, Frequency, OhlcBar};

/// Monthly random-walk bars starting in January 1950. Open gaps, intraperiod
/// range and drift are fixed; only the draws depend on `seed`.
pub fn synthetic_monthly_bars(n: usize, seed: u64) -> BarSeries {
    let z = normal_draws(&mut seeded_rng(seed), 4 * n);
    let f = Frequency::Monthly;
    let mut close = 100.0f64;
    let bars = (0..n)
        .map(|t| {
            let date = f.period_end(NaiveDate::from_ymd_opt(1950 + (t / 12) as i32, (t % 12) as u32 + 1, 1).unwrap());
            let open = close * (0.002 * z[4 * t]).exp();
            let c = open * (0.005 + 0.04 * z[4 * t + 1]).exp();
            let high = open.max(c) * (0.02 * z[4 * t + 2].abs()).exp();
            let low = open.min(c) * (-0.02 * z[4 * t + 3].abs()).exp();
            close = c;
            OhlcBar::new(date, open, high, low, c).expect("valid bar")
        })
        .collect();
    BarSeries::new(f, bars).expect("monotone dates")
}
