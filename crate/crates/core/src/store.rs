//! Immutable versioned-resource store.
//!
//! Revisions of a page are kept sorted by `(timestamp, rev_id)`. Range
//! queries return contiguous slices of that order and never split a group
//! of revisions sharing one timestamp, so paging by timestamp pivots cannot
//! skip or repeat a revision.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::dump::{self, DumpRecord, RecordError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub rev_id: u64,
    pub timestamp: DateTime<Utc>,
    pub content_type: String,
    pub content: Vec<u8>,
}

impl Revision {
    pub fn new(
        rev_id: u64,
        timestamp: DateTime<Utc>,
        content_type: impl Into<String>,
        content: impl Into<Vec<u8>>,
    ) -> Self {
        Revision { rev_id, timestamp, content_type: content_type.into(), content: content.into() }
    }

    fn key(&self) -> (DateTime<Utc>, u64) {
        (self.timestamp, self.rev_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("page {0:?} has no revisions")]
    Empty(String),
    #[error("page title is empty")]
    EmptyTitle,
    #[error("rev_id must be positive (page {0:?})")]
    ZeroRevId(String),
    #[error("duplicate revision {rev_id} for page {title:?}")]
    DuplicateRevision { title: String, rev_id: u64 },
}

/// All revisions of one page, oldest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageHistory {
    title: String,
    revisions: Vec<Revision>,
}

impl PageHistory {
    /// Builds a history from revisions in any order.
    pub fn new(title: impl Into<String>, mut revisions: Vec<Revision>) -> Result<Self, HistoryError> {
        let title = title.into();
        if title.is_empty() {
            return Err(HistoryError::EmptyTitle);
        }
        if revisions.is_empty() {
            return Err(HistoryError::Empty(title));
        }
        let mut seen = HashSet::with_capacity(revisions.len());
        for r in &revisions {
            if r.rev_id == 0 {
                return Err(HistoryError::ZeroRevId(title));
            }
            if !seen.insert(r.rev_id) {
                return Err(HistoryError::DuplicateRevision { title, rev_id: r.rev_id });
            }
        }
        revisions.sort_by_key(Revision::key);
        Ok(PageHistory { title, revisions })
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn revisions(&self) -> &[Revision] {
        &self.revisions
    }

    pub fn len(&self) -> usize {
        self.revisions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Oldest revision ("first memento").
    pub fn first(&self) -> &Revision {
        &self.revisions[0]
    }

    /// Newest revision ("last memento").
    pub fn last(&self) -> &Revision {
        self.revisions.last().expect("history is never empty")
    }

    pub fn revision(&self, rev_id: u64) -> Option<&Revision> {
        self.revisions.iter().find(|r| r.rev_id == rev_id)
    }

    /// The newest `limit` revisions strictly before `pivot`, oldest first.
    pub fn range_before(&self, pivot: DateTime<Utc>, limit: usize) -> &[Revision] {
        let end = self.revisions.partition_point(|r| r.timestamp < pivot);
        self.window_ending_at(end, limit)
    }

    /// The oldest `limit` revisions strictly after `pivot`.
    pub fn range_after(&self, pivot: DateTime<Utc>, limit: usize) -> &[Revision] {
        let begin = self.revisions.partition_point(|r| r.timestamp <= pivot);
        self.window_starting_at(begin, limit)
    }

    /// The newest `limit` revisions, oldest first.
    pub fn latest_window(&self, limit: usize) -> &[Revision] {
        self.window_ending_at(self.revisions.len(), limit)
    }

    /// Revisions whose timestamp equals `instant`.
    pub fn at(&self, instant: DateTime<Utc>) -> &[Revision] {
        let lo = self.revisions.partition_point(|r| r.timestamp < instant);
        let hi = self.revisions.partition_point(|r| r.timestamp <= instant);
        &self.revisions[lo..hi]
    }

    fn window_ending_at(&self, end: usize, limit: usize) -> &[Revision] {
        let revs = &self.revisions[..end];
        if limit == 0 || revs.is_empty() {
            return &[];
        }
        let mut start = end.saturating_sub(limit);
        if start > 0 && revs[start - 1].timestamp == revs[start].timestamp {
            // Drop the partial timestamp group at the old end of the window.
            let split = revs[start].timestamp;
            start = revs.partition_point(|r| r.timestamp <= split);
            if start == end {
                // One group is larger than the limit; keep it whole.
                start = revs.partition_point(|r| r.timestamp < split);
            }
        }
        &revs[start..end]
    }

    fn window_starting_at(&self, begin: usize, limit: usize) -> &[Revision] {
        let revs = &self.revisions;
        if limit == 0 || begin >= revs.len() {
            return &[];
        }
        let mut end = (begin + limit).min(revs.len());
        if end < revs.len() && revs[end].timestamp == revs[end - 1].timestamp {
            let split = revs[end].timestamp;
            end = revs.partition_point(|r| r.timestamp < split);
            if end == begin {
                end = revs.partition_point(|r| r.timestamp <= split);
            }
        }
        &revs[begin..end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("page {0:?} not found")]
    PageNotFound(String),
    #[error("revision {rev_id} of page {title:?} not found")]
    RevisionNotFound { title: String, rev_id: u64 },
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("cannot read revision dump: {0}")]
    Io(#[from] io::Error),
    #[error("line {line_no}: malformed record ({reason})")]
    MalformedRecord { line_no: usize, reason: String },
    #[error("line {line_no}: invalid timestamp")]
    InvalidTimestamp { line_no: usize },
    #[error("duplicate revision {rev_id} for page {title:?}")]
    DuplicateRevision { title: String, rev_id: u64 },
}

/// Every revision of every page, loaded once and read concurrently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Store {
    pages: BTreeMap<String, PageHistory>,
}

impl Store {
    pub fn load_dump(path: impl AsRef<Path>) -> Result<Store, DumpError> {
        let file = File::open(path)?;
        Store::from_reader(BufReader::new(file))
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Store, DumpError> {
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let record = dump::parse_record(&line).map_err(|e| match e {
                RecordError::InvalidTimestamp => DumpError::InvalidTimestamp { line_no },
                other => DumpError::MalformedRecord { line_no, reason: other.to_string() },
            })?;
            records.push(record);
        }
        Store::from_records(records)
    }

    pub fn from_records(records: impl IntoIterator<Item = DumpRecord>) -> Result<Store, DumpError> {
        let mut grouped: BTreeMap<String, Vec<Revision>> = BTreeMap::new();
        for rec in records {
            grouped.entry(rec.title).or_default().push(Revision {
                rev_id: rec.rev_id,
                timestamp: rec.timestamp,
                content_type: rec.content_type,
                content: rec.content,
            });
        }
        let mut pages = BTreeMap::new();
        for (title, revisions) in grouped {
            let history = PageHistory::new(title.clone(), revisions).map_err(|e| match e {
                HistoryError::DuplicateRevision { title, rev_id } => {
                    DumpError::DuplicateRevision { title, rev_id }
                }
                // parse_record already rejects empty titles and zero ids.
                other => DumpError::MalformedRecord { line_no: 0, reason: other.to_string() },
            })?;
            pages.insert(title, history);
        }
        Ok(Store { pages })
    }

    pub fn from_histories(histories: impl IntoIterator<Item = PageHistory>) -> Store {
        Store { pages: histories.into_iter().map(|h| (h.title.clone(), h)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.pages.keys().map(String::as_str)
    }

    pub fn histories(&self) -> impl Iterator<Item = &PageHistory> {
        self.pages.values()
    }

    /// Exact, case-sensitive title lookup.
    pub fn get_history(&self, title: &str) -> Result<&PageHistory, LookupError> {
        self.pages.get(title).ok_or_else(|| LookupError::PageNotFound(title.to_string()))
    }

    pub fn get_revision(&self, title: &str, rev_id: u64) -> Result<&Revision, LookupError> {
        self.get_history(title)?
            .revision(rev_id)
            .ok_or_else(|| LookupError::RevisionNotFound { title: title.to_string(), rev_id })
    }

    pub fn range_before(
        &self,
        title: &str,
        pivot: DateTime<Utc>,
        limit: usize,
    ) -> Result<&[Revision], LookupError> {
        Ok(self.get_history(title)?.range_before(pivot, limit))
    }

    pub fn range_after(
        &self,
        title: &str,
        pivot: DateTime<Utc>,
        limit: usize,
    ) -> Result<&[Revision], LookupError> {
        Ok(self.get_history(title)?.range_after(pivot, limit))
    }

    pub fn latest_window(&self, title: &str, limit: usize) -> Result<&[Revision], LookupError> {
        Ok(self.get_history(title)?.latest_window(limit))
    }
}
