//! Client side of datetime negotiation.

use chrono::{DateTime, Utc};
use memento_core::{format_http_datetime, parse_http_datetime, parse_link, LinkEntry, LinkError};
use reqwest::header::{HeaderMap, CONTENT_LOCATION, LINK, LOCATION};
use reqwest::{redirect, Client, StatusCode, Url};
use thiserror::Error;

pub const ACCEPT_DATETIME: &str = "Accept-Datetime";
pub const MEMENTO_DATETIME: &str = "Memento-Datetime";
pub const X_MEMENTO_ERROR: &str = "X-Memento-Error";

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("{0} does not advertise a TimeGate")]
    NoTimeGateAdvertised(String),
    #[error("{0} does not advertise a TimeMap")]
    NoTimeMapAdvertised(String),
    #[error("negotiation failed with status {status} at {uri}")]
    NegotiationFailed { status: u16, uri: String },
    #[error("unexpected response from {uri}: {detail}")]
    Protocol { uri: String, detail: String },
    #[error("bad Link data from {uri}: {source}")]
    BadLink { uri: String, source: LinkError },
    #[error("TimeMap pages loop back to {0}")]
    CycleDetected(String),
    #[error("TimeMap has more than {0} pages")]
    PageLimitExceeded(usize),
    #[error("bad URL {0:?}")]
    BadUrl(String),
    #[error("request to {uri} failed: {source}")]
    Transport { uri: String, source: reqwest::Error },
}

/// A client that never follows redirects on its own.
pub fn http_client() -> Client {
    Client::builder().redirect(redirect::Policy::none()).build().expect("HTTP client configuration is static")
}

/// A response with the body read.
#[derive(Debug, Clone)]
pub struct Fetched {
    pub url: Url,
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: String,
}

impl Fetched {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).and_then(|v| v.to_str().ok())
    }

    /// The status a friendly-mode error page stands for, else the real one.
    pub fn effective_status(&self) -> u16 {
        self.header(X_MEMENTO_ERROR).and_then(|v| v.trim().parse().ok()).unwrap_or(self.status.as_u16())
    }

    pub fn is_error(&self) -> bool {
        self.effective_status() >= 400
    }

    pub fn links(&self) -> Result<Vec<LinkEntry>, ClientError> {
        let Some(raw) = self.header(LINK.as_str()) else {
            return Ok(Vec::new());
        };
        parse_link(raw).map_err(|source| ClientError::BadLink { uri: self.url.to_string(), source })
    }

    /// Absolute target of the first link carrying `rel`.
    pub fn link_target(&self, rel: &str) -> Result<Option<Url>, ClientError> {
        self.links()?
            .iter()
            .find(|e| e.has_rel(rel))
            .map(|e| self.resolve(&e.target))
            .transpose()
    }

    pub fn resolve(&self, reference: &str) -> Result<Url, ClientError> {
        self.url.join(reference).map_err(|_| ClientError::BadUrl(reference.to_string()))
    }

    pub fn memento_datetime(&self) -> Option<DateTime<Utc>> {
        self.header(MEMENTO_DATETIME).and_then(|v| parse_http_datetime(v).ok()).map(|t| t.instant)
    }
}

pub fn parse_url(text: &str) -> Result<Url, ClientError> {
    Url::parse(text).map_err(|_| ClientError::BadUrl(text.to_string()))
}

pub async fn fetch(client: &Client, url: &Url, accept_datetime: Option<&str>) -> Result<Fetched, ClientError> {
    let mut req = client.get(url.clone());
    if let Some(dt) = accept_datetime {
        req = req.header(ACCEPT_DATETIME, dt);
    }
    let transport = |source| ClientError::Transport { uri: url.to_string(), source };
    let resp = req.send().await.map_err(transport)?;
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp.text().await.map_err(transport)?;
    Ok(Fetched { url: url.clone(), status, headers, body })
}

/// How the TimeGate answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    /// 302 with `Location`.
    Redirect,
    /// 200 with `Content-Location`.
    ContentLocation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegotiatedMemento {
    pub memento_uri: String,
    pub memento_datetime: DateTime<Utc>,
    pub timegate_uri: String,
    pub answer: Answer,
}

impl NegotiatedMemento {
    /// `uri<TAB>Memento-Datetime`.
    pub fn line(&self) -> String {
        format!("{}\t{}", self.memento_uri, format_http_datetime(self.memento_datetime))
    }
}

fn failed(f: &Fetched) -> ClientError {
    ClientError::NegotiationFailed { status: f.effective_status(), uri: f.url.to_string() }
}

/// Finds the TimeGate advertised by `original` and negotiates for
/// `accept_datetime` (an HTTP-date; `None` asks for the current memento).
pub async fn negotiate(
    client: &Client,
    original: &str,
    accept_datetime: Option<&str>,
) -> Result<NegotiatedMemento, ClientError> {
    let url = parse_url(original)?;
    let discovery = fetch(client, &url, None).await?;
    if discovery.is_error() {
        return Err(failed(&discovery));
    }
    let timegate =
        discovery.link_target("timegate")?.ok_or_else(|| ClientError::NoTimeGateAdvertised(original.to_string()))?;
    let gate = fetch(client, &timegate, accept_datetime).await?;
    if gate.is_error() {
        return Err(failed(&gate));
    }
    let (answer, memento_uri, memento_datetime) = match gate.status {
        StatusCode::FOUND | StatusCode::SEE_OTHER | StatusCode::TEMPORARY_REDIRECT => {
            let location = gate.header(LOCATION.as_str()).ok_or_else(|| ClientError::Protocol {
                uri: timegate.to_string(),
                detail: "redirect without Location".into(),
            })?;
            let target = gate.resolve(location)?;
            let memento = fetch(client, &target, accept_datetime).await?;
            if memento.is_error() || !memento.status.is_success() {
                return Err(failed(&memento));
            }
            let dt = memento.memento_datetime();
            (Answer::Redirect, target.to_string(), dt)
        }
        s if s.is_success() => {
            let location = gate.header(CONTENT_LOCATION.as_str()).ok_or_else(|| ClientError::Protocol {
                uri: timegate.to_string(),
                detail: "negotiated 200 without Content-Location".into(),
            })?;
            (Answer::ContentLocation, gate.resolve(location)?.to_string(), gate.memento_datetime())
        }
        _ => return Err(failed(&gate)),
    };
    let memento_datetime = memento_datetime.ok_or_else(|| ClientError::Protocol {
        uri: memento_uri.clone(),
        detail: "memento lacks a valid Memento-Datetime".into(),
    })?;
    Ok(NegotiatedMemento { memento_uri, memento_datetime, timegate_uri: timegate.to_string(), answer })
}
