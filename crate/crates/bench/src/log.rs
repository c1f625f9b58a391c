//! Siege-style request log lines.
//!
//! ```text
//! HTTP/1.1 302   0.60 secs:       0 bytes ==> GET  /demo-special/index.php/Special:TimeGate/Daenerys
//! ```
//!
//! Real Siege output wraps each line in ANSI color escapes; they are
//! stripped before parsing, whether raw (`ESC[0;36m`) or printed literally
//! (`^[[0;36m`).

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    /// 0 when the connection failed.
    pub status: u16,
    pub secs: f64,
    /// `secs` exactly as printed, so reports can echo it unchanged.
    pub secs_text: String,
    pub bytes: u64,
    pub method: String,
    pub uri: String,
}

impl LogRecord {
    pub fn new(status: u16, secs: f64, bytes: u64, method: &str, uri: &str) -> Self {
        LogRecord {
            status,
            secs,
            secs_text: format!("{secs:.2}"),
            bytes,
            method: method.to_string(),
            uri: uri.to_string(),
        }
    }
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HTTP/1.1 {} {:>6} secs: {:>7} bytes ==> {:<4} {}",
            self.status, self.secs_text, self.bytes, self.method, self.uri
        )
    }
}

fn ansi() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:\x1b|\^\[)\[[0-9;]*m").unwrap())
}

fn line_shape() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^HTTP/1\.[01] ([0-9]{1,3})[\t ]+([0-9]+(?:\.[0-9]+)?) secs:[\t ]*([0-9]+) bytes ==> ([A-Z]+)[\t ]+(\S+)$")
            .unwrap()
    })
}

pub fn strip_ansi(line: &str) -> String {
    ansi().replace_all(line, "").into_owned()
}

/// Parses one log line; `None` for anything that is not a request line.
pub fn parse_line(line: &str) -> Option<LogRecord> {
    let clean = strip_ansi(line);
    let caps = line_shape().captures(clean.trim())?;
    let secs_text = caps[2].to_string();
    Some(LogRecord {
        status: caps[1].parse().ok()?,
        secs: secs_text.parse().ok()?,
        secs_text,
        bytes: caps[3].parse().ok()?,
        method: caps[4].to_string(),
        uri: caps[5].to_string(),
    })
}
