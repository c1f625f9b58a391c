//! Summary statistics, histograms and per-page difference reports.

use thiserror::Error;

pub const HISTOGRAM_BUCKETS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no values")]
    Empty,
    #[error("value {0} is not finite")]
    NonFinite(f64),
    #[error("column {0:?} not found")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("CSV error: {0}")]
    Csv(String),
}

/// Median of an odd count is the middle value, of an even count the mean of
/// the middle two.
pub fn summarize(values: &[f64]) -> Result<StatsSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite(*bad));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
    let mean = sorted.iter().sum::<f64>() / n as f64;
    Ok(StatsSummary {
        min: sorted[0],
        max: sorted[n - 1],
        // Rounding can push the mean of near-equal values just outside.
        mean: mean.clamp(sorted[0], sorted[n - 1]),
        median,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bucket {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// `buckets` equal-width buckets spanning min..=max; the last bucket is
/// closed on the right. When every value is equal they all land in the
/// first bucket.
pub fn histogram(values: &[f64], buckets: usize) -> Result<Vec<Bucket>, StatsError> {
    let s = summarize(values)?;
    let buckets = buckets.max(1);
    let width = (s.max - s.min) / buckets as f64;
    let mut out: Vec<Bucket> = (0..buckets)
        .map(|i| Bucket {
            lower: s.min + width * i as f64,
            upper: if i + 1 == buckets { s.max } else { s.min + width * (i + 1) as f64 },
            count: 0,
        })
        .collect();
    for v in values {
        let idx = if width == 0.0 { 0 } else { (((v - s.min) / width) as usize).min(buckets - 1) };
        out[idx].count += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffRow {
    pub page: String,
    pub a: f64,
    pub b: f64,
    /// `a - b`.
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub col_a: String,
    pub col_b: String,
    pub rows: Vec<DiffRow>,
    pub buckets: Vec<Bucket>,
}

impl DiffReport {
    pub fn rows_csv(&self) -> String {
        let mut out = format!("PAGE,{},{},DIFFERENCE\n", self.col_a, self.col_b);
        for r in &self.rows {
            out.push_str(&format!("\"{}\",{},{},{}\n", r.page.replace('"', "\"\""), r.a, r.b, r.diff));
        }
        out
    }

    pub fn buckets_csv(&self) -> String {
        let mut out = String::from("BUCKET,LOWER,UPPER,COUNT\n");
        for (i, b) in self.buckets.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", i + 1, b.lower, b.upper, b.count));
        }
        out
    }
}

/// Reads an analysis CSV and reports `col_a - col_b` per page with a
/// 12-bucket histogram of the differences.
pub fn diff_report(csv_text: &str, col_a: &str, col_b: &str) -> Result<DiffReport, StatsError> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().map_err(|e| StatsError::Csv(e.to_string()))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| StatsError::MissingColumn(name.to_string()))
    };
    let (ia, ib) = (find(col_a)?, find(col_b)?);
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| StatsError::Csv(e.to_string()))?;
        let num = |i: usize| -> Result<f64, StatsError> {
            let field = record.get(i).unwrap_or("");
            field.trim().parse().map_err(|_| StatsError::BadRow { row: n + 1, reason: format!("{field:?} is not a number") })
        };
        let (a, b) = (num(ia)?, num(ib)?);
        rows.push(DiffRow { page: record.get(0).unwrap_or("").to_string(), a, b, diff: a - b });
    }
    let diffs: Vec<f64> = rows.iter().map(|r| r.diff).collect();
    let buckets = if diffs.is_empty() { vec![] } else { histogram(&diffs, HISTOGRAM_BUCKETS)? };
    Ok(DiffReport { col_a: col_a.to_string(), col_b: col_b.to_string(), rows, buckets })
}
