//! `Link` header values and `application/link-format` TimeMap bodies.
//!
//! Canonical form: `<target>; rel="r1 r2"` followed by the optional
//! attributes in the fixed order `type`, `datetime`, `from`, `until`. Header
//! entries are joined by `,`; TimeMap bodies put one entry per line, joined
//! by `,\n`. The parser accepts both, with any whitespace around separators.

use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::negotiator::{format_http_datetime, parse_http_date};
use crate::timemap::TimeMapPage;

pub const LINK_FORMAT: &str = "application/link-format";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkEntry {
    pub target: String,
    pub rels: Vec<String>,
    pub media_type: Option<String>,
    pub datetime: Option<DateTime<Utc>>,
    pub from: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
}

impl LinkEntry {
    pub fn new<S: AsRef<str>>(target: impl Into<String>, rels: &[S]) -> Self {
        LinkEntry {
            target: target.into(),
            rels: rels.iter().map(|r| r.as_ref().to_string()).collect(),
            media_type: None,
            datetime: None,
            from: None,
            until: None,
        }
    }

    pub fn with_type(mut self, media_type: impl Into<String>) -> Self {
        self.media_type = Some(media_type.into());
        self
    }

    pub fn with_datetime(mut self, datetime: DateTime<Utc>) -> Self {
        self.datetime = Some(datetime);
        self
    }

    pub fn with_range(mut self, from: DateTime<Utc>, until: DateTime<Utc>) -> Self {
        self.from = Some(from);
        self.until = Some(until);
        self
    }

    pub fn has_rel(&self, rel: &str) -> bool {
        self.rels.iter().any(|r| r.eq_ignore_ascii_case(rel))
    }

    fn render_into(&self, out: &mut String) {
        let _ = write!(out, "<{}>; rel=\"{}\"", self.target, self.rels.join(" "));
        if let Some(t) = &self.media_type {
            let _ = write!(out, "; type=\"{t}\"");
        }
        for (name, value) in [("datetime", self.datetime), ("from", self.from), ("until", self.until)] {
            if let Some(v) = value {
                let _ = write!(out, "; {name}=\"{}\"", format_http_datetime(v));
            }
        }
    }
}

/// Renders a `Link` header value.
pub fn render_link_header(entries: &[LinkEntry]) -> String {
    render_joined(entries, ",")
}

/// Renders a TimeMap page as an `application/link-format` body.
pub fn render_timemap(page: &TimeMapPage) -> String {
    let mut body = render_joined(&page.link_entries(), ",\n");
    body.push('\n');
    body
}

fn render_joined(entries: &[LinkEntry], sep: &str) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        e.render_into(&mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("link syntax error at byte {position}: {message}")]
pub struct LinkError {
    pub position: usize,
    pub message: &'static str,
}

/// Parses a `Link` header value or a link-format body.
///
/// Attributes other than `rel`, `type`, `datetime`, `from` and `until` are
/// skipped. A repeated attribute keeps its first occurrence.
pub fn parse_link(text: &str) -> Result<Vec<LinkEntry>, LinkError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    let mut entries = Vec::new();
    p.skip_ws();
    while !p.at_end() {
        entries.push(p.entry()?);
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect(b',', "expected ',' between links")?;
        p.skip_ws();
    }
    Ok(entries)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: &'static str) -> LinkError {
        LinkError { position: self.pos, message }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8, message: &'static str) -> Result<(), LinkError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(message))
        }
    }

    fn entry(&mut self) -> Result<LinkEntry, LinkError> {
        let start = self.pos;
        self.expect(b'<', "expected '<'")?;
        let uri_start = self.pos;
        while self.peek().is_some_and(|c| c != b'>') {
            self.pos += 1;
        }
        if self.at_end() {
            return Err(self.err("unterminated '<'"));
        }
        let target = self.text[uri_start..self.pos].to_string();
        self.pos += 1;

        let mut entry = LinkEntry::new(target, &[] as &[&str]);
        let mut seen_rel = false;
        loop {
            self.skip_ws();
            if self.peek() != Some(b';') {
                break;
            }
            self.pos += 1;
            self.skip_ws();
            let (name, value, value_pos) = self.param()?;
            let date = |v: &str| {
                parse_http_date(v)
                    .map(Some)
                    .map_err(|_| LinkError { position: value_pos, message: "invalid HTTP date" })
            };
            match name.to_ascii_lowercase().as_str() {
                "rel" if !seen_rel => {
                    seen_rel = true;
                    entry.rels = value.split_ascii_whitespace().map(str::to_string).collect();
                }
                "type" if entry.media_type.is_none() => entry.media_type = Some(value),
                "datetime" if entry.datetime.is_none() => entry.datetime = date(&value)?,
                "from" if entry.from.is_none() => entry.from = date(&value)?,
                "until" if entry.until.is_none() => entry.until = date(&value)?,
                _ => {}
            }
        }
        if entry.rels.is_empty() {
            return Err(LinkError { position: start, message: "link has no rel" });
        }
        Ok(entry)
    }

    fn param(&mut self) -> Result<(String, String, usize), LinkError> {
        let name_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || b"-_.*".contains(&c)) {
            self.pos += 1;
        }
        if self.pos == name_start {
            return Err(self.err("expected parameter name"));
        }
        let name = self.text[name_start..self.pos].to_string();
        self.skip_ws();
        self.expect(b'=', "expected '='")?;
        self.skip_ws();
        let value_pos = self.pos;
        let value = match self.peek() {
            Some(b'"') => self.quoted()?,
            _ => {
                let s = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| !matches!(c, b';' | b',' | b' ' | b'\t' | b'\r' | b'\n' | b'"'))
                {
                    self.pos += 1;
                }
                if self.pos == s {
                    return Err(self.err("expected parameter value"));
                }
                self.text[s..self.pos].to_string()
            }
        };
        Ok((name, value, value_pos))
    }

    fn quoted(&mut self) -> Result<String, LinkError> {
        self.pos += 1;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated quoted string")),
                Some(b'"') => {
                    self.pos += 1;
                    break;
                }
                Some(b'\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                        None => return Err(self.err("unterminated quoted string")),
                    }
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
        String::from_utf8(out).map_err(|_| self.err("invalid UTF-8 in quoted string"))
    }
}
