//! Building blocks for serving web time travel over versioned pages.
//!
//! - [`store`]: the immutable revision store and its range queries
//! - [`dump`]: the tab-separated revision dump format
//! - [`negotiator`]: HTTP-date / pivot parsing and memento selection
//! - [`linkrel`]: the `Link` header and `application/link-format` codec
//! - [`timemap`]: paged TimeMap construction
//! - [`perf`]: the analytical model of negotiation-pattern latency

pub mod dump;
pub mod linkrel;
pub mod negotiator;
pub mod perf;
pub mod store;
pub mod timemap;

pub use linkrel::{parse_link, render_link_header, render_timemap, LinkEntry, LinkError, LINK_FORMAT};
pub use negotiator::{
    format_http_datetime, negotiate, parse_http_datetime, parse_pivot, DatetimeError, DatetimeSource,
    NegotiationResult, TargetDatetime,
};
pub use store::{DumpError, LookupError, PageHistory, Revision, Store};
pub use timemap::{build_page, PivotDirection, TimeMapPage, TimeMapSelection, UriScheme};
