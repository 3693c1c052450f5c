//! OHLC bar ingestion, validation and re-sampling.
//!
//! The canonical on-disk layout is delimiter-separated text with the header
//! `date,open,high,low,close`. Dates are normalised to the last calendar day
//! of their period so that monthly and quarterly series can be joined by date.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Monthly,
    Quarterly,
}

impl Frequency {
    /// Periods per year, used for annualisation.
    pub fn periods_per_year(self) -> f64 {
        match self {
            Frequency::Daily => 252.0,
            Frequency::Monthly => 12.0,
            Frequency::Quarterly => 4.0,
        }
    }

    /// Snap an arbitrary calendar date to the end of the period containing it.
    pub fn period_end(self, date: NaiveDate) -> NaiveDate {
        match self {
            Frequency::Daily => date,
            Frequency::Monthly => month_end(date.year(), date.month()),
            Frequency::Quarterly => {
                let last_month = (date.month() - 1) / 3 * 3 + 3;
                month_end(date.year(), last_month)
            }
        }
    }

    pub fn format_date(self, date: NaiveDate) -> String {
        match self {
            Frequency::Daily => date.format("%Y-%m-%d").to_string(),
            Frequency::Monthly => date.format("%Y-%m").to_string(),
            Frequency::Quarterly => format!("{}-Q{}", date.year(), (date.month() - 1) / 3 + 1),
        }
    }

    /// Parse a date token and normalise it to the period end.
    ///
    /// Accepted forms: `YYYY-MM-DD`, `YYYY-MM`, `YYYY-Qn`, and the compact
    /// `YYYYMM` used by common predictor files.
    pub fn parse_date(self, token: &str) -> Option<NaiveDate> {
        let token = token.trim();
        let raw = if let Ok(d) = NaiveDate::parse_from_str(token, "%Y-%m-%d") {
            d
        } else if let Some((y, q)) = token.split_once("-Q").or_else(|| token.split_once("-q")) {
            if self == Frequency::Daily {
                return None;
            }
            let year: i32 = y.parse().ok()?;
            let quarter: u32 = q.parse().ok()?;
            if !(1..=4).contains(&quarter) {
                return None;
            }
            NaiveDate::from_ymd_opt(year, quarter * 3, 1)?
        } else if let Some((y, m)) = token.split_once('-') {
            if self == Frequency::Daily {
                return None;
            }
            NaiveDate::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, 1)?
        } else if token.len() == 6 && token.bytes().all(|b| b.is_ascii_digit()) {
            if self == Frequency::Daily {
                return None;
            }
            NaiveDate::from_ymd_opt(token[..4].parse().ok()?, token[4..].parse().ok()?, 1)?
        } else {
            return None;
        };
        Some(self.period_end(raw))
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Frequency::Daily => "daily",
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "daily" | "d" => Ok(Frequency::Daily),
            "monthly" | "m" => Ok(Frequency::Monthly),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            other => Err(Error::Config(format!("unknown frequency `{other}`"))),
        }
    }
}

fn month_end(year: i32, month: u32) -> NaiveDate {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    NaiveDate::from_ymd_opt(ny, nm, 1).and_then(|d| d.pred_opt()).expect("valid calendar month")
}

fn month_index(date: NaiveDate) -> i64 {
    date.year() as i64 * 12 + date.month() as i64 - 1
}

/// One open/high/low/close observation, dated at period end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
}

impl OhlcBar {
    /// Build a bar, enforcing `0 < low <= min(open, close)` and
    /// `high >= max(open, close)`.
    pub fn new(date: NaiveDate, open: f64, high: f64, low: f64, close: f64) -> Result<Self> {
        let bar = OhlcBar { date, open, high, low, close };
        bar.validate().map_err(|message| Error::InvalidBar { row: 0, message })?;
        Ok(bar)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let prices = [self.open, self.high, self.low, self.close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(format!(
                "prices must be finite and positive (o={}, h={}, l={}, c={})",
                self.open, self.high, self.low, self.close
            ));
        }
        if self.high < self.open.max(self.close) {
            return Err(format!("high {} below max(open, close) {}", self.high, self.open.max(self.close)));
        }
        if self.low > self.open.min(self.close) {
            return Err(format!("low {} above min(open, close) {}", self.low, self.open.min(self.close)));
        }
        Ok(())
    }
}

/// A validated, strictly date-ordered series of bars at a single frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarSeries {
    frequency: Frequency,
    bars: Vec<OhlcBar>,
}

impl BarSeries {
    pub fn new(frequency: Frequency, bars: Vec<OhlcBar>) -> Result<Self> {
        for (i, bar) in bars.iter().enumerate() {
            bar.validate().map_err(|message| Error::InvalidBar { row: i + 1, message })?;
            if frequency.period_end(bar.date) != bar.date {
                return Err(Error::Parse {
                    row: i + 1,
                    column: "date".into(),
                    message: format!("{} is not a {frequency} period end", bar.date),
                });
            }
        }
        for (i, w) in bars.windows(2).enumerate() {
            if w[1].date <= w[0].date {
                return Err(Error::NonMonotoneDates { row: i + 2, date: frequency.format_date(w[1].date) });
            }
        }
        Ok(BarSeries { frequency, bars })
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn bars(&self) -> &[OhlcBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    /// Sub-series with dates in `[from, to]` (inclusive, either bound optional).
    pub fn slice_dates(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> BarSeries {
        let bars = self
            .bars
            .iter()
            .filter(|b| from.is_none_or(|f| b.date >= f) && to.is_none_or(|t| b.date <= t))
            .copied()
            .collect();
        BarSeries { frequency: self.frequency, bars }
    }

    /// Write the series in the canonical `date,open,high,low,close` layout.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io { path: "<writer>".into(), source: std::io::Error::other(e) };
        w.write_record(["date", "open", "high", "low", "close"]).map_err(io)?;
        for b in &self.bars {
            w.write_record([
                self.frequency.format_date(b.date),
                b.open.to_string(),
                b.high.to_string(),
                b.low.to_string(),
                b.close.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io { path: "<writer>".into(), source: e })?;
        Ok(())
    }
}

fn sniff_delimiter(header: &str) -> u8 {
    if header.contains('\t') {
        b'\t'
    } else if header.contains(';') && !header.contains(',') {
        b';'
    } else {
        b','
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(s)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    let header = text.lines().next().unwrap_or("");
    csv::ReaderBuilder::new()
        .delimiter(sniff_delimiter(header))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn record_err(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { row, column: String::new(), message: e.to_string() }
}

/// Load OHLC bars from a delimiter-separated file.
///
/// Columns are located by header name (case-insensitive), so exports with
/// extra columns such as volume are accepted. Reported row numbers are file
/// line numbers. A file in strictly descending date order is reversed.
pub fn load_bars(path: impl AsRef<Path>, frequency: Frequency) -> Result<BarSeries> {
    let text = read_to_string(path.as_ref())?;
    parse_bars(&text, frequency)
}

pub fn parse_bars(text: &str, frequency: Frequency) -> Result<BarSeries> {
    let mut rdr = csv_reader(text);
    let headers = rdr.headers().map_err(record_err)?.clone();
    let find = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h.eq_ignore_ascii_case(name)).ok_or_else(|| Error::Parse {
            row: 1,
            column: name.into(),
            message: "missing header column".into(),
        })
    };
    let cols = [find("date")?, find("open")?, find("high")?, find("low")?, find("close")?];
    let names = ["date", "open", "high", "low", "close"];

    let mut bars = Vec::new();
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(record_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |k: usize| rec.get(cols[k]).unwrap_or("");
        let date = frequency.parse_date(field(0)).ok_or_else(|| Error::Parse {
            row: line,
            column: "date".into(),
            message: format!("cannot parse `{}` as a {frequency} date", field(0)),
        })?;
        let mut px = [0.0; 4];
        for k in 1..5 {
            px[k - 1] = field(k).parse::<f64>().map_err(|e| Error::Parse {
                row: line,
                column: names[k].into(),
                message: format!("`{}`: {e}", field(k)),
            })?;
        }
        let bar = OhlcBar { date, open: px[0], high: px[1], low: px[2], close: px[3] };
        bar.validate().map_err(|message| Error::InvalidBar { row: line, message })?;
        bars.push(bar);
        lines.push(line);
    }

    let descending = bars.len() >= 2 && bars.windows(2).all(|w| w[1].date < w[0].date);
    if descending {
        bars.reverse();
        lines.reverse();
    }
    for i in 1..bars.len() {
        if bars[i].date <= bars[i - 1].date {
            return Err(Error::NonMonotoneDates { row: lines[i], date: frequency.format_date(bars[i].date) });
        }
    }
    Ok(BarSeries { frequency, bars })
}

/// Aggregate a monthly series into quarters.
///
/// Per quarter: open of the first month, close of the last, max of the highs
/// and min of the lows. A trailing partial quarter is dropped with a warning.
pub fn to_quarterly(monthly: &BarSeries) -> Result<BarSeries> {
    if monthly.frequency != Frequency::Monthly {
        return Err(Error::InvalidSpec(format!("to_quarterly expects a monthly series, got {}", monthly.frequency)));
    }
    let bars = &monthly.bars;
    if let Some(first) = bars.first() {
        if (first.date.month() - 1) % 3 != 0 {
            return Err(Error::QuarterMisaligned(Frequency::Monthly.format_date(first.date)));
        }
    }
    for w in bars.windows(2) {
        if month_index(w[1].date) != month_index(w[0].date) + 1 {
            return Err(Error::NonContiguous(Frequency::Monthly.format_date(w[1].date)));
        }
    }
    let chunks = bars.chunks_exact(3);
    if !chunks.remainder().is_empty() {
        log::warn!(
            "dropping trailing partial quarter of {} month(s) starting {}",
            chunks.remainder().len(),
            Frequency::Monthly.format_date(chunks.remainder()[0].date)
        );
    }
    let quarters = chunks
        .map(|q| OhlcBar {
            date: Frequency::Quarterly.period_end(q[2].date),
            open: q[0].open,
            high: q.iter().map(|b| b.high).fold(f64::NEG_INFINITY, f64::max),
            low: q.iter().map(|b| b.low).fold(f64::INFINITY, f64::min),
            close: q[2].close,
        })
        .collect();
    Ok(BarSeries { frequency: Frequency::Quarterly, bars: quarters })
}

/// A named auxiliary series on a fixed calendar; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<f64>>,
}

impl PredictorSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<Option<f64>>) -> Result<Self> {
        crate::error::ensure_same_len(dates.len(), values.len())?;
        Ok(PredictorSeries { name: name.into(), dates, values })
    }

    /// Values re-indexed onto `dates`; dates absent from this series map to `None`.
    pub fn aligned_to(&self, dates: &[NaiveDate]) -> Vec<Option<f64>> {
        let lookup: HashMap<NaiveDate, Option<f64>> =
            self.dates.iter().copied().zip(self.values.iter().copied()).collect();
        dates.iter().map(|d| lookup.get(d).copied().flatten()).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Result of loading a wide predictor file against a calendar.
#[derive(Debug, Clone)]
pub struct PredictorTable {
    pub series: Vec<PredictorSeries>,
    /// File rows whose date is not on the calendar.
    pub dropped_rows: usize,
}

impl PredictorTable {
    pub fn get(&self, name: &str) -> Option<&PredictorSeries> {
        self.series.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }
}

fn is_missing_token(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "" | "na" | "nan" | "n/a" | "." | "null")
}

/// Load a wide predictor file (one column per variable) aligned to `calendar`.
///
/// Rows are snapped to the calendar's period ends; when several rows land in
/// one period the last one wins, so monthly rows on a quarterly calendar give
/// quarter-end values.
pub fn load_predictors(path: impl AsRef<Path>, calendar: &BarSeries) -> Result<PredictorTable> {
    let text = read_to_string(path.as_ref())?;
    parse_predictors(&text, calendar)
}

pub fn parse_predictors(text: &str, calendar: &BarSeries) -> Result<PredictorTable> {
    let freq = calendar.frequency();
    let mut rdr = csv_reader(text);
    let headers = rdr.headers().map_err(record_err)?.clone();
    let date_col = headers
        .iter()
        .position(|h| {
            let h = h.to_ascii_lowercase();
            h == "date" || h == "yyyymm" || h == "yyyyq"
        })
        .unwrap_or(0);
    let mut seen = HashSet::new();
    let mut names = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == date_col {
            continue;
        }
        if !seen.insert(h.to_ascii_lowercase()) {
            return Err(Error::DuplicateColumn(h.to_string()));
        }
        names.push((i, h.to_string()));
    }

    let cal_dates = calendar.dates();
    let index: HashMap<NaiveDate, usize> = cal_dates.iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let mut values = vec![vec![None; cal_dates.len()]; names.len()];
    let mut dropped = 0usize;
    let mut matched = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(record_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let token = rec.get(date_col).unwrap_or("");
        let date = freq.parse_date(token).ok_or_else(|| Error::Parse {
            row: line,
            column: headers.get(date_col).unwrap_or("date").to_string(),
            message: format!("cannot parse `{token}` as a {freq} date"),
        })?;
        let Some(&slot) = index.get(&date) else {
            dropped += 1;
            continue;
        };
        matched += 1;
        for (k, (col, name)) in names.iter().enumerate() {
            let cell = rec.get(*col).unwrap_or("");
            if is_missing_token(cell) {
                continue;
            }
            let v = cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                row: line,
                column: name.clone(),
                message: format!("`{cell}`: {e}"),
            })?;
            values[k][slot] = Some(v);
        }
    }
    if matched == 0 {
        return Err(Error::NoOverlap);
    }
    if dropped > 0 {
        log::info!("predictor file: {dropped} row(s) outside the calendar dropped");
    }
    let series = names
        .into_iter()
        .zip(values)
        .map(|((_, name), values)| PredictorSeries { name, dates: cal_dates.clone(), values })
        .collect();
    Ok(PredictorTable { series, dropped_rows: dropped })
}
