//! Protocol conformance audit of a live server.

use std::fmt;

use chrono::Utc;
use memento_core::{format_http_datetime, parse_link};
use reqwest::header::{CONTENT_LOCATION, LOCATION, VARY};
use reqwest::{Client, StatusCode, Url};

use crate::client::{fetch, parse_url, ClientError, Fetched};

/// An impossible date used to provoke a 400.
pub const MALFORMED_DATETIME: &str = "Mon, 30 Feb 2014 00:00:00 GMT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectedPattern {
    P11,
    P12,
    P21,
    None,
}

impl DetectedPattern {
    pub fn label(self) -> &'static str {
        match self {
            DetectedPattern::P11 => "p1.1",
            DetectedPattern::P12 => "p1.2",
            DetectedPattern::P21 => "p2.1",
            DetectedPattern::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Reported but never a failure (optional features).
    Info,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub rule: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl Check {
    /// Discovery rules decide whether a pattern can be detected at all.
    pub fn is_discovery(&self) -> bool {
        self.rule.starts_with("discovery.")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub step: usize,
    pub uri: String,
    pub status: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceReport {
    pub pattern_detected: DetectedPattern,
    pub checks: Vec<Check>,
    pub memento_chain: Vec<ChainStep>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn check(&self, rule: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.rule == rule)
    }

    /// One line per check and chain step, then the detected pattern.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.memento_chain.iter().map(|s| format!("STEP\t{}\t{}\t{}", s.step, s.status, s.uri)).collect();
        out.extend(self.checks.iter().map(|c| format!("{}\t{}\t{}", c.outcome, c.rule, c.detail)));
        out.push(format!("PATTERN\t{}", self.pattern_detected.label()));
        out
    }
}

struct Auditor<'c> {
    client: &'c Client,
    checks: Vec<Check>,
    chain: Vec<ChainStep>,
}

impl Auditor<'_> {
    fn record(&mut self, rule: &'static str, ok: bool, detail: impl Into<String>) -> bool {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self.checks.push(Check { rule, outcome, detail: detail.into() });
        ok
    }

    async fn get(&mut self, url: &Url, accept_datetime: Option<&str>) -> Result<Fetched, ClientError> {
        let f = fetch(self.client, url, accept_datetime).await?;
        self.chain.push(ChainStep { step: self.chain.len() + 1, uri: url.to_string(), status: f.status.as_u16() });
        Ok(f)
    }

    /// Records whether the response's Link header parses.
    fn link_header(&mut self, rule: &'static str, f: &Fetched) -> bool {
        match f.links() {
            Ok(_) => self.record(rule, true, format!("{}", f.url)),
            Err(e) => self.record(rule, false, e.to_string()),
        }
    }

    fn finish(self, pattern: DetectedPattern) -> ConformanceReport {
        ConformanceReport { pattern_detected: pattern, checks: self.checks, memento_chain: self.chain }
    }
}

fn varies_on_accept_datetime(f: &Fetched) -> bool {
    f.headers
        .get_all(VARY)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(','))
        .any(|t| t.trim().eq_ignore_ascii_case("accept-datetime"))
}

/// Audits the resource at `url`, negotiating for `accept_datetime` (now when
/// absent). Transport failures abort; protocol problems become failed checks.
pub async fn audit(client: &Client, url: &str, accept_datetime: Option<&str>) -> Result<ConformanceReport, ClientError> {
    let original = parse_url(url)?;
    let target = accept_datetime.map_or_else(|| format_http_datetime(Utc::now()), str::to_string);
    let mut a = Auditor { client, checks: Vec::new(), chain: Vec::new() };

    let first = a.get(&original, None).await?;
    if !a.record("discovery.original", !first.is_error(), format!("status {}", first.effective_status())) {
        return Ok(a.finish(DetectedPattern::None));
    }
    if !a.link_header("link.original", &first) {
        a.record("discovery.timegate", false, "Link header unreadable");
        return Ok(a.finish(DetectedPattern::None));
    }
    let timegate = first.link_target("timegate")?;
    let timemap = first.link_target("timemap")?;
    a.record("discovery.timemap", timemap.is_some(), timemap.as_ref().map_or("no timemap link".into(), Url::to_string));
    let Some(timegate) = timegate else {
        a.record("discovery.timegate", false, "no timegate link");
        return Ok(a.finish(DetectedPattern::None));
    };
    a.record("discovery.timegate", true, timegate.to_string());

    let gate = a.get(&timegate, Some(&target)).await?;
    a.record("timegate.vary", varies_on_accept_datetime(&gate), "Vary names Accept-Datetime");
    a.link_header("link.timegate", &gate);
    let self_gate = timegate == original;
    let (pattern, memento) = if gate.status == StatusCode::FOUND && !gate.is_error() {
        match gate.header(LOCATION.as_str()).map(|l| gate.resolve(l)) {
            Some(Ok(location)) => {
                a.record("discovery.negotiation", true, format!("302 to {location}"));
                let memento = a.get(&location, None).await?;
                a.link_header("link.memento", &memento);
                (if self_gate { DetectedPattern::P11 } else { DetectedPattern::P21 }, Some(memento))
            }
            _ => {
                a.record("discovery.negotiation", false, "302 without a usable Location");
                (DetectedPattern::None, None)
            }
        }
    } else if gate.status.is_success() && !gate.is_error() && gate.header(CONTENT_LOCATION.as_str()).is_some() {
        if self_gate {
            a.record("discovery.negotiation", true, "200 with Content-Location");
            (DetectedPattern::P12, Some(gate.clone()))
        } else {
            a.record("discovery.negotiation", false, "distinct TimeGate answered 200");
            (DetectedPattern::None, Some(gate.clone()))
        }
    } else {
        a.record("discovery.negotiation", false, format!("TimeGate answered {}", gate.effective_status()));
        (DetectedPattern::None, None)
    };

    if let Some(m) = &memento {
        let dt = m.header("Memento-Datetime").unwrap_or("");
        a.record("memento.datetime", m.memento_datetime().is_some(), format!("Memento-Datetime: {dt}"));
        let links = m.links().unwrap_or_default();
        let first_last = links.iter().any(|e| e.has_rel("first")) && links.iter().any(|e| e.has_rel("last"));
        let detail = if first_last { "first and last mementos linked" } else { "first/last relations not sent" };
        a.checks.push(Check { rule: "relations.first-last", outcome: Outcome::Info, detail: detail.into() });
    }

    let bad = a.get(&timegate, Some(MALFORMED_DATETIME)).await?;
    a.record("timegate.bad-datetime-400", bad.effective_status() == 400, format!("status {}", bad.effective_status()));

    if let Some(tm) = timemap {
        let page = a.get(&tm, None).await?;
        match parse_link(&page.body) {
            Err(e) => {
                a.record("timemap.link-format", false, e.to_string());
            }
            Ok(entries) => {
                let mementos: Vec<_> = entries.iter().filter(|e| e.has_rel("memento")).collect();
                a.record(
                    "timemap.link-format",
                    page.status.is_success() && !mementos.is_empty(),
                    format!("{} mementos", mementos.len()),
                );
                match entries.iter().find(|e| e.has_rel("self")).and_then(|s| s.from.zip(s.until)) {
                    Some((from, until)) => {
                        let inside = mementos.iter().all(|m| m.datetime.is_some_and(|d| from <= d && d <= until));
                        a.record("timemap.bounds", inside, "self from/until bound every memento");
                    }
                    None => a.checks.push(Check {
                        rule: "timemap.bounds",
                        outcome: Outcome::Info,
                        detail: "self link carries no from/until".into(),
                    }),
                }
            }
        }
    }
    Ok(a.finish(pattern))
}
