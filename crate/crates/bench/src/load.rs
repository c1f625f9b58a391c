//! A small Siege-like load driver.
//!
//! Each URL is fetched with redirects followed by hand so every hop gets its
//! own log line, as Siege prints them. Lines of one URL stay contiguous even
//! when several URLs are in flight.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use futures::stream::{self, StreamExt};
use reqwest::header::{HeaderValue, LOCATION};
use reqwest::{redirect, Client, Url};

use crate::log::LogRecord;

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub concurrency: usize,
    /// Sent as `Accept-Datetime` on every hop.
    pub accept_datetime: Option<String>,
    pub max_redirects: usize,
    pub timeout: Duration,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { concurrency: 1, accept_datetime: None, max_redirects: 10, timeout: Duration::from_secs(30) }
    }
}

/// Logged URI: path and query only, like Siege.
fn logged_uri(url: &Url) -> String {
    match url.query() {
        Some(q) => format!("{}?{}", url.path(), q),
        None => url.path().to_string(),
    }
}

async fn fetch_chain(client: &Client, raw: &str, opts: &LoadOptions) -> Vec<LogRecord> {
    let mut lines = Vec::new();
    let Ok(mut url) = Url::parse(raw) else {
        lines.push(LogRecord::new(0, 0.0, 0, "GET", raw));
        return lines;
    };
    for _ in 0..=opts.max_redirects {
        let mut req = client.get(url.clone());
        if let Some(dt) = &opts.accept_datetime {
            req = req.header("Accept-Datetime", dt);
        }
        let started = Instant::now();
        let resp = match req.send().await {
            Ok(r) => r,
            Err(_) => {
                lines.push(LogRecord::new(0, started.elapsed().as_secs_f64(), 0, "GET", &logged_uri(&url)));
                return lines;
            }
        };
        let status = resp.status();
        let location = resp.headers().get(LOCATION).and_then(|v: &HeaderValue| v.to_str().ok()).map(str::to_string);
        let (code, bytes) = match resp.bytes().await {
            Ok(body) => (status.as_u16(), body.len() as u64),
            Err(_) => (0, 0),
        };
        lines.push(LogRecord::new(code, started.elapsed().as_secs_f64(), bytes, "GET", &logged_uri(&url)));
        match location.and_then(|l| url.join(&l).ok()) {
            Some(next) if code != 0 && status.is_redirection() => url = next,
            _ => return lines,
        }
    }
    lines
}

/// Requests every URL once, writing log lines to `out` as each URL's chain
/// completes. Connection failures are logged with status 0.
pub async fn run_load<W: Write>(urls: &[String], opts: &LoadOptions, out: &mut W) -> io::Result<Vec<LogRecord>> {
    let client = Client::builder()
        .redirect(redirect::Policy::none())
        .timeout(opts.timeout)
        .build()
        .map_err(io::Error::other)?;
    let mut chains = stream::iter(urls).map(|u| fetch_chain(&client, u, opts)).buffer_unordered(opts.concurrency.max(1));
    let mut all = Vec::new();
    while let Some(chain) = chains.next().await {
        for rec in &chain {
            writeln!(out, "{rec}")?;
        }
        all.extend(chain);
    }
    out.flush()?;
    Ok(all)
}
