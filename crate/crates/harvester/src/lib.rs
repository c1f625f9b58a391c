//! Pulls page histories from a MediaWiki-compatible API into revision dumps,
//! and validates dumps.

pub mod harvest;
pub mod verify;

pub use harvest::{
    dump_title, fetch_title, harvest, harvest_to_file, HarvestError, HarvestJob, HarvestSummary, TitleHarvest,
    MAX_BATCH_LIMIT,
};
pub use verify::{verify_dump, verify_reader, DumpReport, Violation, ViolationKind};
