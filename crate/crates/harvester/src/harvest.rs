//! Revision history retrieval from a MediaWiki Action API.
//!
//! One `action=query&prop=revisions` request returns at most `batch_limit`
//! revisions, oldest first; the `continue` object of each reply is passed
//! back verbatim until the API stops sending one.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use chrono::{DateTime, Utc};
use futures::stream::{self, StreamExt};
use memento_core::dump::{write_record, DumpRecord};
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

/// The API refuses larger `rvlimit` values for content queries.
pub const MAX_BATCH_LIMIT: u32 = 500;
pub const WIKITEXT: &str = "text/x-wiki";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarvestJob {
    /// Full URI of `api.php`.
    pub api_endpoint: String,
    pub titles: Vec<String>,
    pub batch_limit: u32,
    /// Pause before every request after the first one of a title.
    pub polite_delay: Duration,
    /// Titles fetched concurrently.
    pub workers: usize,
}

impl HarvestJob {
    pub fn new(api_endpoint: impl Into<String>, titles: Vec<String>) -> Self {
        HarvestJob {
            api_endpoint: api_endpoint.into(),
            titles,
            batch_limit: MAX_BATCH_LIMIT,
            polite_delay: Duration::ZERO,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), HarvestError> {
        if !(1..=MAX_BATCH_LIMIT).contains(&self.batch_limit) {
            return Err(HarvestError::InvalidJob(format!(
                "batch_limit must be within 1..={MAX_BATCH_LIMIT}, got {}",
                self.batch_limit
            )));
        }
        if self.workers == 0 {
            return Err(HarvestError::InvalidJob("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HarvestSummary {
    /// Titles that produced at least one record.
    pub pages: usize,
    pub revisions: usize,
    pub requests: usize,
    /// Titles the API reported missing (or with no revisions).
    pub missing: Vec<String>,
}

#[derive(Debug, Error)]
pub enum HarvestError {
    #[error("invalid harvest job: {0}")]
    InvalidJob(String),
    #[error("HTTP {status} from {url}")]
    Http { status: u16, url: String },
    #[error("API error {code}: {info}")]
    Api { code: String, info: String },
    #[error("unexpected API reply: {0}")]
    Decode(String),
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("cannot write dump: {0}")]
    Io(#[from] io::Error),
}

/// Outcome for one title.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TitleHarvest {
    Found { records: Vec<DumpRecord>, requests: usize },
    Missing { requests: usize },
}

#[derive(Debug, Deserialize)]
struct Reply {
    #[serde(default)]
    error: Option<ApiError>,
    #[serde(default)]
    query: Option<Query>,
    #[serde(default, rename = "continue")]
    continuation: Option<BTreeMap<String, Value>>,
}

#[derive(Debug, Deserialize)]
struct ApiError {
    code: String,
    #[serde(default)]
    info: String,
}

#[derive(Debug, Deserialize)]
struct Query {
    #[serde(default)]
    pages: Vec<ApiPage>,
}

#[derive(Debug, Deserialize)]
struct ApiPage {
    #[serde(default)]
    missing: bool,
    #[serde(default)]
    invalid: bool,
    #[serde(default)]
    revisions: Vec<ApiRevision>,
}

#[derive(Debug, Deserialize)]
struct ApiRevision {
    revid: u64,
    timestamp: String,
    #[serde(default)]
    slots: Option<Slots>,
    /// Pre-slot APIs put the text directly on the revision.
    #[serde(default)]
    content: Option<String>,
    #[serde(default)]
    contentformat: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Slots {
    main: Slot,
}

#[derive(Debug, Deserialize)]
struct Slot {
    #[serde(default)]
    content: Option<String>,
    #[serde(default)]
    contentformat: Option<String>,
}

/// Dump titles use underscores where the wiki shows spaces.
pub fn dump_title(title: &str) -> String {
    title.trim().replace(' ', "_")
}

fn convert(title: &str, rev: ApiRevision) -> Result<DumpRecord, HarvestError> {
    let timestamp = DateTime::parse_from_rfc3339(&rev.timestamp)
        .map_err(|_| HarvestError::Decode(format!("bad timestamp {:?} on revision {}", rev.timestamp, rev.revid)))?
        .with_timezone(&Utc);
    let (content, format) = match rev.slots {
        Some(Slots { main }) => (main.content, main.contentformat),
        None => (rev.content, rev.contentformat),
    };
    // Suppressed revisions come back without text; keep the revision.
    Ok(DumpRecord {
        title: title.to_string(),
        rev_id: rev.revid,
        timestamp,
        content_type: format.unwrap_or_else(|| WIKITEXT.to_string()),
        content: content.unwrap_or_default().into_bytes(),
    })
}

/// Every revision of `title`, oldest first, following continuation.
pub async fn fetch_title(
    client: &reqwest::Client,
    job: &HarvestJob,
    title: &str,
) -> Result<TitleHarvest, HarvestError> {
    let limit = job.batch_limit.to_string();
    let base: Vec<(&str, &str)> = vec![
        ("action", "query"),
        ("prop", "revisions"),
        ("titles", title),
        ("rvprop", "ids|timestamp|content"),
        ("rvslots", "main"),
        ("rvlimit", &limit),
        ("rvdir", "newer"),
        ("format", "json"),
        ("formatversion", "2"),
    ];
    let name = dump_title(title);
    let mut records = Vec::new();
    let mut continuation: Option<BTreeMap<String, Value>> = None;
    let mut requests = 0;
    loop {
        if requests > 0 && !job.polite_delay.is_zero() {
            tokio::time::sleep(job.polite_delay).await;
        }
        let mut params: Vec<(String, String)> = base.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (k, v) in continuation.iter().flatten() {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            params.push((k.clone(), v));
        }
        let resp = client.get(&job.api_endpoint).query(&params).send().await?;
        requests += 1;
        let status = resp.status();
        if !status.is_success() {
            return Err(HarvestError::Http { status: status.as_u16(), url: resp.url().to_string() });
        }
        let reply: Reply = resp.json().await?;
        if let Some(e) = reply.error {
            return Err(HarvestError::Api { code: e.code, info: e.info });
        }
        let page = reply
            .query
            .and_then(|q| q.pages.into_iter().next())
            .ok_or_else(|| HarvestError::Decode(format!("no page in reply for {title:?}")))?;
        if page.missing || page.invalid {
            return Ok(TitleHarvest::Missing { requests });
        }
        for rev in page.revisions {
            records.push(convert(&name, rev)?);
        }
        match reply.continuation {
            Some(c) if !c.is_empty() => continuation = Some(c),
            _ => break,
        }
    }
    if records.is_empty() {
        return Ok(TitleHarvest::Missing { requests });
    }
    Ok(TitleHarvest::Found { records, requests })
}

/// Harvests every title of `job` and writes the records to `out`, grouped by
/// title in job order and oldest first within a title.
pub async fn harvest(job: &HarvestJob, out: &mut impl Write) -> Result<HarvestSummary, HarvestError> {
    job.validate()?;
    let client = reqwest::Client::builder()
        .user_agent(concat!("memento-harvester/", env!("CARGO_PKG_VERSION")))
        .build()?;
    let mut results = stream::iter(job.titles.iter())
        .map(|t| fetch_title(&client, job, t))
        .buffered(job.workers);
    let mut summary = HarvestSummary::default();
    let mut titles = job.titles.iter();
    while let Some(result) = results.next().await {
        let title = titles.next().expect("one result per title");
        match result? {
            TitleHarvest::Found { records, requests } => {
                summary.pages += 1;
                summary.revisions += records.len();
                summary.requests += requests;
                for rec in &records {
                    write_record(out, rec)?;
                }
            }
            TitleHarvest::Missing { requests } => {
                summary.requests += requests;
                summary.missing.push(title.clone());
            }
        }
    }
    out.flush()?;
    Ok(summary)
}

pub async fn harvest_to_file(job: &HarvestJob, path: impl AsRef<Path>) -> Result<HarvestSummary, HarvestError> {
    let mut out = BufWriter::new(File::create(path)?);
    harvest(job, &mut out).await
}
