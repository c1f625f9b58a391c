//! Datetime handling and best-memento selection.
//!
//! Every negotiation style (302 TimeGate, 200-style self negotiation, the
//! experimental self-redirecting page) funnels through [`negotiate`], so a
//! given history and target always select the same revision.
//!
//! Selection rule: the newest revision at or before the target, ordered by
//! `(timestamp, rev_id)`. Targets older than the whole history clamp to the
//! first revision.

use chrono::{DateTime, Datelike, NaiveDate, TimeZone, Utc};
use thiserror::Error;

use crate::store::{PageHistory, Revision};

const WEEKDAYS: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatetimeError {
    #[error("datetime is not formatted correctly: {0:?}")]
    BadFormat(String),
    #[error("datetime names an impossible date: {0:?}")]
    ImpossibleDate(String),
}

/// Where a negotiation target came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatetimeSource {
    Header,
    PivotUri,
    DefaultNow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetDatetime {
    pub instant: DateTime<Utc>,
    pub source: DatetimeSource,
}

impl TargetDatetime {
    /// Current wall-clock time truncated to whole seconds.
    pub fn now() -> Self {
        let secs = Utc::now().timestamp();
        TargetDatetime {
            instant: Utc.timestamp_opt(secs, 0).single().expect("current time is representable"),
            source: DatetimeSource::DefaultNow,
        }
    }
}

/// Parses an RFC 1123 `HTTP-date` such as `Sun, 22 Apr 2007 15:01:20 GMT`.
///
/// The weekday token must be a real day name but is not checked against
/// the calendar date.
pub fn parse_http_datetime(text: &str) -> Result<TargetDatetime, DatetimeError> {
    let instant = parse_http_date(text)?;
    Ok(TargetDatetime { instant, source: DatetimeSource::Header })
}

pub(crate) fn parse_http_date(text: &str) -> Result<DateTime<Utc>, DatetimeError> {
    let bad = || DatetimeError::BadFormat(text.to_string());
    let s = text.trim();
    // "Sun, 22 Apr 2007 15:01:20 GMT" is always 29 bytes.
    if s.len() != 29 || !s.is_ascii() {
        return Err(bad());
    }
    let b = s.as_bytes();
    if &s[3..5] != ", "
        || b[7] != b' '
        || b[11] != b' '
        || b[16] != b' '
        || b[19] != b':'
        || b[22] != b':'
        || b[25] != b' '
        || &s[26..] != "GMT"
    {
        return Err(bad());
    }
    if !WEEKDAYS.contains(&&s[0..3]) {
        return Err(bad());
    }
    let month = MONTHS.iter().position(|m| *m == &s[8..11]).ok_or_else(bad)? as u32 + 1;
    let day = digits(&s[5..7]).ok_or_else(bad)?;
    let year = digits(&s[12..16]).ok_or_else(bad)?;
    let hour = digits(&s[17..19]).ok_or_else(bad)?;
    let minute = digits(&s[20..22]).ok_or_else(bad)?;
    let second = digits(&s[23..25]).ok_or_else(bad)?;
    assemble(text, year as i32, month, day, hour, minute, second)
}

/// Parses a 14-digit `YYYYMMDDHHMMSS` UTC pivot as used in paged TimeMap URIs.
pub fn parse_pivot(text: &str) -> Result<TargetDatetime, DatetimeError> {
    let instant = parse_compact(text)?;
    Ok(TargetDatetime { instant, source: DatetimeSource::PivotUri })
}

/// Parses the 14-digit compact form shared by pivots and revision dumps.
pub fn parse_compact(text: &str) -> Result<DateTime<Utc>, DatetimeError> {
    if text.len() != 14 || !text.bytes().all(|c| c.is_ascii_digit()) {
        return Err(DatetimeError::BadFormat(text.to_string()));
    }
    let n = |r: std::ops::Range<usize>| digits(&text[r]).expect("checked digits");
    assemble(text, n(0..4) as i32, n(4..6), n(6..8), n(8..10), n(10..12), n(12..14))
}

fn digits(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn assemble(
    text: &str,
    year: i32,
    month: u32,
    day: u32,
    hour: u32,
    minute: u32,
    second: u32,
) -> Result<DateTime<Utc>, DatetimeError> {
    let impossible = || DatetimeError::ImpossibleDate(text.to_string());
    if year < 1970 {
        return Err(impossible());
    }
    let date = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(impossible)?;
    // chrono accepts second == 60 for leap seconds; HTTP dates do not.
    if second > 59 {
        return Err(impossible());
    }
    let time = date.and_hms_opt(hour, minute, second).ok_or_else(impossible)?;
    Ok(Utc.from_utc_datetime(&time))
}

/// Renders an instant in RFC 1123 form, e.g. `Sat, 23 Feb 2013 01:55:23 GMT`.
pub fn format_http_datetime(instant: DateTime<Utc>) -> String {
    let weekday = WEEKDAYS[instant.weekday().num_days_from_monday() as usize];
    let month = MONTHS[instant.month0() as usize];
    format!(
        "{}, {:02} {} {:04} {}",
        weekday,
        instant.day(),
        month,
        instant.year(),
        instant.format("%H:%M:%S GMT")
    )
}

/// Renders the 14-digit compact form.
pub fn format_compact(instant: DateTime<Utc>) -> String {
    instant.format("%Y%m%d%H%M%S").to_string()
}

/// Converts whole seconds since the epoch to an instant, if representable.
pub fn instant_from_secs(secs: i64) -> Option<DateTime<Utc>> {
    DateTime::from_timestamp(secs, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegotiationResult<'h> {
    pub selected: &'h Revision,
    pub first: &'h Revision,
    pub last: &'h Revision,
    /// `selected.timestamp == target`.
    pub is_exact: bool,
}

/// Picks the best memento of `history` for `target`.
pub fn negotiate<'h>(history: &'h PageHistory, target: &TargetDatetime) -> NegotiationResult<'h> {
    let revisions = history.revisions();
    let first = history.first();
    let last = history.last();
    // Revisions are sorted by (timestamp, rev_id); everything up to the
    // partition point is at or before the target.
    let at_or_before = revisions.partition_point(|r| r.timestamp <= target.instant);
    let selected = if at_or_before == 0 { first } else { &revisions[at_or_before - 1] };
    NegotiationResult {
        selected,
        first,
        last,
        is_exact: selected.timestamp == target.instant,
    }
}
