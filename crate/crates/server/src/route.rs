//! Request classification.
//!
//! URI shapes, relative to the path of `base_url`:
//!
//! | path                            | kind                                  |
//! |---------------------------------|---------------------------------------|
//! | `/wiki/{title}`                 | original (or self-negotiation)        |
//! | `/wiki/{title}?rev={id}`        | memento                               |
//! | `/timegate/{title}`             | distinct TimeGate                     |
//! | `/timegate/`                    | TimeGate usage page                   |
//! | `/timemap/{title}`              | latest TimeMap page                   |
//! | `/timemap/{pivot}/-1/{title}`   | TimeMap page before pivot             |
//! | `/timemap/{pivot}/1/{title}`    | TimeMap page after pivot              |

use chrono::{DateTime, Utc};
use hyper::header::HeaderMap;
use hyper::Method;
use memento_core::negotiator::parse_compact;
use memento_core::{DatetimeError, PivotDirection, TimeMapSelection};
use percent_encoding::percent_decode_str;
use thiserror::Error;

use crate::config::{NegotiationPattern, ServerConfig};

pub const ACCEPT_DATETIME: &str = "accept-datetime";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKind {
    OriginalDirect,
    MementoDirect,
    TimeGate302,
    /// The page URI negotiating for itself with a 200.
    Negotiated200,
    /// The page URI negotiating for itself with a 302 (experimental).
    SelfTimeGate302,
    TimeGateUsage,
    TimeMapFull,
    TimeMapPivotAscending,
    TimeMapPivotDescending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub kind: ResourceKind,
    /// Decoded title; empty only for [`ResourceKind::TimeGateUsage`].
    pub title: String,
    pub rev_id: Option<u64>,
    pub pivot: Option<DateTime<Utc>>,
}

impl Route {
    fn new(kind: ResourceKind, title: String) -> Self {
        Route { kind, title, rev_id: None, pivot: None }
    }

    pub fn timemap_selection(&self) -> Option<TimeMapSelection> {
        match (self.kind, self.pivot) {
            (ResourceKind::TimeMapFull, _) => Some(TimeMapSelection::Latest),
            (ResourceKind::TimeMapPivotDescending, Some(p)) => {
                Some(TimeMapSelection::Pivot(p, PivotDirection::Descending))
            }
            (ResourceKind::TimeMapPivotAscending, Some(p)) => {
                Some(TimeMapSelection::Pivot(p, PivotDirection::Ascending))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("no resource at this path")]
    UnknownRoute,
    #[error("method not allowed")]
    MethodNotAllowed,
    #[error("revision id {0:?} is not a positive integer")]
    BadRevision(String),
    #[error("bad TimeMap pivot: {0}")]
    BadPivot(DatetimeError),
}

/// Classifies a request. `target` is the request path plus optional query.
pub fn route(
    method: &Method,
    target: &str,
    headers: &HeaderMap,
    config: &ServerConfig,
) -> Result<Route, RouteError> {
    if method != Method::GET && method != Method::HEAD {
        return Err(RouteError::MethodNotAllowed);
    }
    let (path, query) = match target.split_once('?') {
        Some((p, q)) => (p, Some(q)),
        None => (target, None),
    };
    let path = path.strip_prefix(config.base_path()).ok_or(RouteError::UnknownRoute)?;

    if let Some(rest) = path.strip_prefix("/wiki/") {
        let title = decode_title(rest)?;
        if let Some(rev) = query.and_then(rev_param) {
            let rev_id = rev.parse::<u64>().ok().filter(|id| *id > 0).ok_or(RouteError::BadRevision(rev))?;
            return Ok(Route { rev_id: Some(rev_id), ..Route::new(ResourceKind::MementoDirect, title) });
        }
        let negotiating = headers.contains_key(ACCEPT_DATETIME);
        let kind = match (config.negotiation_pattern, negotiating) {
            (NegotiationPattern::P200, true) => ResourceKind::Negotiated200,
            (NegotiationPattern::P11, true) => ResourceKind::SelfTimeGate302,
            _ => ResourceKind::OriginalDirect,
        };
        return Ok(Route::new(kind, title));
    }
    if path == "/timegate" || path == "/timegate/" {
        return Ok(Route::new(ResourceKind::TimeGateUsage, String::new()));
    }
    if let Some(rest) = path.strip_prefix("/timegate/") {
        return Ok(Route::new(ResourceKind::TimeGate302, decode_title(rest)?));
    }
    if let Some(rest) = path.strip_prefix("/timemap/") {
        return timemap_route(rest);
    }
    Err(RouteError::UnknownRoute)
}

fn timemap_route(rest: &str) -> Result<Route, RouteError> {
    let mut parts = rest.splitn(3, '/');
    if let (Some(pivot), Some(dir), Some(title)) = (parts.next(), parts.next(), parts.next()) {
        let kind = match dir {
            "-1" => Some(ResourceKind::TimeMapPivotDescending),
            "1" => Some(ResourceKind::TimeMapPivotAscending),
            _ => None,
        };
        if let Some(kind) = kind {
            let title = decode_title(title)?;
            let pivot = parse_compact(pivot).map_err(RouteError::BadPivot)?;
            return Ok(Route { pivot: Some(pivot), ..Route::new(kind, title) });
        }
    }
    Ok(Route::new(ResourceKind::TimeMapFull, decode_title(rest)?))
}

fn decode_title(raw: &str) -> Result<String, RouteError> {
    let title = percent_decode_str(raw).decode_utf8().map_err(|_| RouteError::UnknownRoute)?;
    if title.is_empty() {
        return Err(RouteError::UnknownRoute);
    }
    Ok(title.into_owned())
}

fn rev_param(query: &str) -> Option<String> {
    url::form_urlencoded::parse(query.as_bytes()).find(|(k, _)| k == "rev").map(|(_, v)| v.into_owned())
}
