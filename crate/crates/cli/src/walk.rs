//! Enumerates every memento of a paged TimeMap.
//!
//! From the starting page the walker follows neighbor `timemap` links back
//! in time until none remain, then forward. Direction is read from the
//! neighbors' `from`/`until` relative to the current page; neighbors without
//! a range are not followed.

use std::collections::{BTreeSet, HashSet};

use chrono::{DateTime, Utc};
use memento_core::{parse_link, LinkEntry, LINK_FORMAT};
use reqwest::header::CONTENT_TYPE;
use reqwest::{Client, Url};

use crate::client::{fetch, parse_url, ClientError, Fetched};

pub const MAX_PAGES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WalkedMemento {
    pub datetime: DateTime<Utc>,
    pub uri: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkResult {
    /// Ascending by (datetime, uri), without duplicates.
    pub mementos: Vec<WalkedMemento>,
    /// TimeMap pages fetched, in fetch order.
    pub pages: Vec<String>,
}

struct Page {
    url: Url,
    from: Option<DateTime<Utc>>,
    until: Option<DateTime<Utc>>,
    neighbors: Vec<(Url, DateTime<Utc>, DateTime<Utc>)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Back,
    Forward,
}

fn is_link_format(f: &Fetched) -> bool {
    f.header(CONTENT_TYPE.as_str()).is_some_and(|t| t.trim_start().starts_with(LINK_FORMAT))
}

fn read_page(f: &Fetched, found: &mut BTreeSet<WalkedMemento>) -> Result<Page, ClientError> {
    let entries: Vec<LinkEntry> =
        parse_link(&f.body).map_err(|source| ClientError::BadLink { uri: f.url.to_string(), source })?;
    let mut page = Page { url: f.url.clone(), from: None, until: None, neighbors: Vec::new() };
    let mut range: Option<(DateTime<Utc>, DateTime<Utc>)> = None;
    for e in &entries {
        if e.has_rel("memento") {
            let datetime = e.datetime.ok_or_else(|| ClientError::Protocol {
                uri: f.url.to_string(),
                detail: format!("memento {} has no datetime", e.target),
            })?;
            found.insert(WalkedMemento { datetime, uri: f.resolve(&e.target)?.to_string() });
            range = Some(match range {
                Some((lo, hi)) => (lo.min(datetime), hi.max(datetime)),
                None => (datetime, datetime),
            });
        }
    }
    for e in &entries {
        if e.has_rel("self") {
            page.from = e.from;
            page.until = e.until;
        } else if e.has_rel("timemap") {
            if let (Some(from), Some(until)) = (e.from, e.until) {
                let target = f.resolve(&e.target)?;
                if target != f.url {
                    page.neighbors.push((target, from, until));
                }
            }
        }
    }
    if let Some((lo, hi)) = range {
        page.from = page.from.or(Some(lo));
        page.until = page.until.or(Some(hi));
    }
    Ok(page)
}

fn neighbor(page: &Page, dir: Direction) -> Option<Url> {
    let (from, until) = (page.from?, page.until?);
    page.neighbors
        .iter()
        .find(|(_, n_from, n_until)| match dir {
            Direction::Back => *n_from < from,
            Direction::Forward => *n_until > until,
        })
        .map(|(u, _, _)| u.clone())
}

/// Walks the TimeMap at `start`, which may also be a resource advertising
/// a `timemap` link.
pub async fn walk_timemap(client: &Client, start: &str) -> Result<WalkResult, ClientError> {
    let mut url = parse_url(start)?;
    let mut first = fetch(client, &url, None).await?;
    if !is_link_format(&first) {
        if first.is_error() {
            return Err(ClientError::NegotiationFailed { status: first.effective_status(), uri: start.to_string() });
        }
        url = first.link_target("timemap")?.ok_or_else(|| ClientError::NoTimeMapAdvertised(start.to_string()))?;
        first = fetch(client, &url, None).await?;
    }
    if first.is_error() || !first.status.is_success() {
        return Err(ClientError::NegotiationFailed { status: first.effective_status(), uri: url.to_string() });
    }

    let mut found = BTreeSet::new();
    let start_page = read_page(&first, &mut found)?;
    let mut pages = vec![start_page.url.to_string()];
    for dir in [Direction::Back, Direction::Forward] {
        let mut chain: HashSet<Url> = HashSet::from([start_page.url.clone()]);
        let mut next = neighbor(&start_page, dir);
        while let Some(target) = next {
            if !chain.insert(target.clone()) {
                return Err(ClientError::CycleDetected(target.to_string()));
            }
            if pages.len() >= MAX_PAGES {
                return Err(ClientError::PageLimitExceeded(MAX_PAGES));
            }
            let fetched = fetch(client, &target, None).await?;
            if fetched.is_error() || !fetched.status.is_success() {
                return Err(ClientError::NegotiationFailed {
                    status: fetched.effective_status(),
                    uri: target.to_string(),
                });
            }
            let page = read_page(&fetched, &mut found)?;
            pages.push(page.url.to_string());
            next = neighbor(&page, dir);
        }
    }
    Ok(WalkResult { mementos: found.into_iter().collect(), pages })
}
