use chrono::{DateTime, Utc};
use memento_core::negotiator::format_compact;
use memento_core::{PivotDirection, UriScheme};
use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};

use crate::config::ServerConfig;

/// Characters escaped in a title path segment. `/` and `:` stay literal so
/// subpage and namespaced titles read naturally.
const TITLE: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'`')
    .add(b'{')
    .add(b'}')
    .add(b'\\')
    .add(b'^')
    .add(b'|')
    .add(b',')
    .add(b';');

pub fn encode_title(title: &str) -> String {
    utf8_percent_encode(title, TITLE).to_string()
}

/// URIs as served by this server. Under a self-negotiating pattern the page
/// URI is also the TimeGate.
#[derive(Debug, Clone)]
pub struct ServerUris {
    base: String,
    self_timegate: bool,
}

impl ServerUris {
    pub fn new(config: &ServerConfig) -> Self {
        ServerUris {
            base: config.base_url.clone(),
            self_timegate: config.negotiation_pattern.self_negotiating(),
        }
    }

    /// The distinct TimeGate URI, whatever the pattern.
    pub fn distinct_timegate(&self, title: &str) -> String {
        format!("{}/timegate/{}", self.base, encode_title(title))
    }
}

impl UriScheme for ServerUris {
    fn original(&self, title: &str) -> String {
        format!("{}/wiki/{}", self.base, encode_title(title))
    }

    fn memento(&self, title: &str, rev_id: u64) -> String {
        format!("{}/wiki/{}?rev={rev_id}", self.base, encode_title(title))
    }

    fn timegate(&self, title: &str) -> String {
        if self.self_timegate {
            self.original(title)
        } else {
            self.distinct_timegate(title)
        }
    }

    fn timemap(&self, title: &str) -> String {
        format!("{}/timemap/{}", self.base, encode_title(title))
    }

    fn timemap_pivot(&self, title: &str, pivot: DateTime<Utc>, direction: PivotDirection) -> String {
        format!(
            "{}/timemap/{}/{}/{}",
            self.base,
            format_compact(pivot),
            direction.as_path_segment(),
            encode_title(title)
        )
    }
}
