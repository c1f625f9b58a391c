//! Load generation and log analysis for comparing Memento deployments.

pub mod analyze;
pub mod load;
pub mod log;
pub mod stats;
pub mod variant;

pub use analyze::{analyze_pages, analyze_timegate, variant_values, Analysis, LineCounts, Metric};
pub use load::{run_load, LoadOptions};
pub use log::{parse_line, strip_ansi, LogRecord};
pub use stats::{diff_report, histogram, summarize, Bucket, DiffReport, DiffRow, StatsError, StatsSummary, HISTOGRAM_BUCKETS};
pub use variant::{page_name, Variant, VariantTable};
