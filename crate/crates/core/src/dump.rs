//! The revision dump file format.
//!
//! One record per line, five tab-separated fields:
//!
//! ```text
//! title <TAB> rev_id <TAB> YYYYMMDDHHMMSS <TAB> content_type <TAB> content
//! ```
//!
//! Only `content` is escaped: `\\` for a backslash, `\t` for a tab, `\n` for
//! a newline and `\r` for a carriage return. Any other backslash sequence is
//! an error. Titles and content types may not contain tabs or line breaks.
//! Blank lines are ignored.

use std::io::{self, Write};

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::negotiator::{format_compact, parse_compact};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpRecord {
    pub title: String,
    pub rev_id: u64,
    pub timestamp: DateTime<Utc>,
    pub content_type: String,
    pub content: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("expected 5 tab-separated fields, found {0}")]
    FieldCount(usize),
    #[error("empty title")]
    EmptyTitle,
    #[error("rev_id is not a positive integer")]
    BadRevId,
    #[error("invalid timestamp")]
    InvalidTimestamp,
    #[error("empty content type")]
    EmptyContentType,
    #[error("bad escape sequence in content")]
    BadEscape,
    #[error("field contains a tab or line break")]
    UnencodableField,
}

pub fn parse_record(line: &str) -> Result<DumpRecord, RecordError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(RecordError::FieldCount(fields.len()));
    }
    let title = fields[0];
    if title.is_empty() {
        return Err(RecordError::EmptyTitle);
    }
    let rev_id: u64 = fields[1].parse().map_err(|_| RecordError::BadRevId)?;
    if rev_id == 0 || !fields[1].bytes().all(|b| b.is_ascii_digit()) {
        return Err(RecordError::BadRevId);
    }
    let timestamp = parse_compact(fields[2]).map_err(|_| RecordError::InvalidTimestamp)?;
    if fields[3].is_empty() {
        return Err(RecordError::EmptyContentType);
    }
    Ok(DumpRecord {
        title: title.to_string(),
        rev_id,
        timestamp,
        content_type: fields[3].to_string(),
        content: unescape(fields[4])?,
    })
}

pub fn format_record(record: &DumpRecord) -> Result<String, RecordError> {
    let plain = |s: &str| !s.contains(['\t', '\n', '\r']);
    if record.title.is_empty() {
        return Err(RecordError::EmptyTitle);
    }
    if !plain(&record.title) || !plain(&record.content_type) {
        return Err(RecordError::UnencodableField);
    }
    if record.rev_id == 0 {
        return Err(RecordError::BadRevId);
    }
    Ok(format!(
        "{}\t{}\t{}\t{}\t{}",
        record.title,
        record.rev_id,
        format_compact(record.timestamp),
        record.content_type,
        escape(&record.content)
    ))
}

pub fn write_record(out: &mut impl Write, record: &DumpRecord) -> io::Result<()> {
    let line = format_record(record).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    writeln!(out, "{line}")
}

/// Content is stored as UTF-8 text; invalid sequences are replaced.
fn escape(content: &[u8]) -> String {
    let text = String::from_utf8_lossy(content);
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> Result<Vec<u8>, RecordError> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            _ => return Err(RecordError::BadEscape),
        }
    }
    Ok(out.into_bytes())
}
