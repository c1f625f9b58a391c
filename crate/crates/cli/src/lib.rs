//! Client tools and the `memento` command line.

pub mod audit;
pub mod client;
pub mod commands;
pub mod model;
pub mod walk;

pub use audit::{audit, Check, ConformanceReport, DetectedPattern, Outcome};
pub use client::{http_client, negotiate, Answer, ClientError, NegotiatedMemento};
pub use commands::{build_server_config, run, Cli, CliError};
pub use walk::{walk_timemap, WalkResult, WalkedMemento, MAX_PAGES};
