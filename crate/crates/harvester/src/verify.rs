//! Dump validation that reports every problem instead of stopping at the
//! first one.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, Utc};
use memento_core::dump::{parse_record, RecordError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Malformed(String),
    InvalidTimestamp,
    Duplicate { title: String, rev_id: u64, first_line: usize },
    /// A higher revision id carries an earlier timestamp than a lower one.
    OrderingInversion { title: String, lower_rev: u64, higher_rev: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based line of the offending record.
    pub line_no: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line_no)?;
        match &self.kind {
            ViolationKind::Malformed(reason) => write!(f, "malformed record ({reason})"),
            ViolationKind::InvalidTimestamp => write!(f, "invalid timestamp"),
            ViolationKind::Duplicate { title, rev_id, first_line } => {
                write!(f, "revision {rev_id} of {title:?} already appeared on line {first_line}")
            }
            ViolationKind::OrderingInversion { title, lower_rev, higher_rev } => write!(
                f,
                "revision {higher_rev} of {title:?} is timestamped before revision {lower_rev}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DumpReport {
    /// Records that parsed.
    pub records: usize,
    pub pages: usize,
    pub violations: Vec<Violation>,
}

impl DumpReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_dump(path: impl AsRef<Path>) -> io::Result<DumpReport> {
    verify_reader(BufReader::new(File::open(path)?))
}

pub fn verify_reader(reader: impl BufRead) -> io::Result<DumpReport> {
    let mut report = DumpReport::default();
    // title -> rev_id -> (timestamp, line)
    let mut pages: BTreeMap<String, BTreeMap<u64, (DateTime<Utc>, usize)>> = BTreeMap::new();
    let mut seen: HashMap<(String, u64), usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec = match parse_record(&line) {
            Ok(r) => r,
            Err(RecordError::InvalidTimestamp) => {
                report.violations.push(Violation { line_no, kind: ViolationKind::InvalidTimestamp });
                continue;
            }
            Err(e) => {
                report.violations.push(Violation { line_no, kind: ViolationKind::Malformed(e.to_string()) });
                continue;
            }
        };
        report.records += 1;
        let key = (rec.title.clone(), rec.rev_id);
        if let Some(&first_line) = seen.get(&key) {
            report.violations.push(Violation {
                line_no,
                kind: ViolationKind::Duplicate { title: rec.title, rev_id: rec.rev_id, first_line },
            });
            continue;
        }
        seen.insert(key, line_no);
        pages.entry(rec.title).or_default().insert(rec.rev_id, (rec.timestamp, line_no));
    }
    report.pages = pages.len();
    let mut inversions = vec![];
    for (title, revs) in &pages {
        let ordered: Vec<_> = revs.iter().collect();
        for pair in ordered.windows(2) {
            let ((lower, (t_lo, _)), (higher, (t_hi, line_no))) = (pair[0], pair[1]);
            if t_hi < t_lo {
                inversions.push(Violation {
                    line_no: *line_no,
                    kind: ViolationKind::OrderingInversion {
                        title: title.clone(),
                        lower_rev: *lower,
                        higher_rev: *higher,
                    },
                });
            }
        }
    }
    report.violations.extend(inversions);
    report.violations.sort_by_key(|v| v.line_no);
    Ok(report)
}
