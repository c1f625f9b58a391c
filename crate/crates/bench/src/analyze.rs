//! Per-page comparison tables from request logs.
//!
//! Output CSV has one row per page that has a value for every column; page
//! names are always double-quoted and values are echoed as logged. Pages
//! lacking a column produce a diagnostic line instead of a row.

use indexmap::IndexMap;

use crate::log::{parse_line, LogRecord};
use crate::variant::{page_name, Variant, VariantTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Secs,
    Bytes,
}

/// Where each input line went. `total` always equals the sum of the others.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LineCounts {
    pub total: usize,
    /// Stored as a table value.
    pub consumed: usize,
    /// Valid request lines with a status the analysis ignores.
    pub filtered: usize,
    /// Lines of the right status whose page or variant could not be
    /// determined; each has a diagnostic.
    pub unclassified: usize,
    /// Lines that are not request lines at all (banners, blanks, garbage).
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub csv: String,
    pub diagnostics: Vec<String>,
    pub counts: LineCounts,
}

struct Column {
    header: &'static str,
    label: &'static str,
    variant: Variant,
}

const TIMEGATE_COLUMNS: &[Column] = &[
    Column { header: "SPECIAL", label: "special", variant: Variant::Pattern21 },
    Column { header: "DEFAULT", label: "default", variant: Variant::Pattern11 },
];

const PAGE_COLUMNS: &[Column] = &[
    Column { header: "NOT_INSTALLED", label: "not-installed", variant: Variant::NotInstalled },
    Column { header: "DEFAULT", label: "default", variant: Variant::Default },
    Column { header: "ALL_HEADERS", label: "all-headers", variant: Variant::AllHeaders },
];

/// Negotiation latency per page: the 302 lines of each TimeGate deployment.
pub fn analyze_timegate(log: &str, table: &VariantTable) -> Analysis {
    analyze(log, table, 302, Metric::Secs, TIMEGATE_COLUMNS)
}

/// Page or TimeMap cost per page across deployments, from the 200 lines.
pub fn analyze_pages(log: &str, table: &VariantTable, metric: Metric) -> Analysis {
    analyze(log, table, 200, metric, PAGE_COLUMNS)
}

fn value_of(rec: &LogRecord, metric: Metric) -> String {
    match metric {
        Metric::Secs => rec.secs_text.clone(),
        Metric::Bytes => rec.bytes.to_string(),
    }
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

fn analyze(log: &str, table: &VariantTable, status: u16, metric: Metric, columns: &[Column]) -> Analysis {
    let mut counts = LineCounts::default();
    let mut diagnostics = Vec::new();
    let mut stats: IndexMap<String, Vec<Option<String>>> = IndexMap::new();
    for (idx, line) in log.lines().enumerate() {
        counts.total += 1;
        let Some(rec) = parse_line(line) else {
            counts.skipped += 1;
            continue;
        };
        if rec.status != status {
            counts.filtered += 1;
            continue;
        }
        let Some(page) = page_name(&rec.uri) else {
            counts.unclassified += 1;
            diagnostics.push(format!("line {}: failed to find page name in {}", idx + 1, rec.uri));
            continue;
        };
        let column = table
            .classify(&rec.uri)
            .and_then(|v| columns.iter().position(|c| c.variant == v));
        let Some(column) = column else {
            counts.unclassified += 1;
            diagnostics.push(format!("line {}: no column for {}", idx + 1, rec.uri));
            continue;
        };
        counts.consumed += 1;
        // A repeated measurement replaces the earlier one.
        stats.entry(page).or_insert_with(|| vec![None; columns.len()])[column] = Some(value_of(&rec, metric));
    }

    let mut csv = columns.iter().fold(String::from("PAGE"), |mut acc, c| {
        acc.push(',');
        acc.push_str(c.header);
        acc
    });
    csv.push('\n');
    for (page, values) in &stats {
        if values.iter().all(Option::is_some) {
            csv.push_str(&quote(page));
            for v in values.iter().flatten() {
                csv.push(',');
                csv.push_str(v);
            }
            csv.push('\n');
        } else {
            let missing: Vec<&str> =
                columns.iter().zip(values).filter(|(_, v)| v.is_none()).map(|(c, _)| c.label).collect();
            diagnostics.push(format!("Page '{page}' is missing statistics for [{}]", missing.join(",")));
        }
    }
    Analysis { csv, diagnostics, counts }
}

/// The metric of every `status` line whose URI classifies as `variant`.
pub fn variant_values(log: &str, table: &VariantTable, status: u16, variant: Variant, metric: Metric) -> Vec<f64> {
    log.lines()
        .filter_map(parse_line)
        .filter(|r| r.status == status && table.classify(&r.uri) == Some(variant))
        .map(|r| match metric {
            Metric::Secs => r.secs,
            Metric::Bytes => r.bytes as f64,
        })
        .collect()
}
