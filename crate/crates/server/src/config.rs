//! Server configuration.
//!
//! The file format is flat `key = value` text, one setting per line, `#`
//! starting a comment. Keys are the [`ServerConfig`] field names.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;
use url::Url;

pub const DEFAULT_PAGE_SIZE: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorPageType {
    /// 200 with the error message in the body.
    #[default]
    Friendly,
    /// Real 4xx/5xx status codes.
    Traditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegotiationPattern {
    /// Pattern 2.1: distinct TimeGate answering 302.
    #[default]
    P302,
    /// Pattern 1.2: the page negotiates itself and answers 200.
    P200,
    /// Pattern 1.1: the page negotiates itself and answers 302. Experimental;
    /// it defeats caching of the page for every Memento client.
    P11,
}

impl NegotiationPattern {
    /// Whether the page URI doubles as its own TimeGate.
    pub fn self_negotiating(self) -> bool {
        !matches!(self, NegotiationPattern::P302)
    }
}

/// Which namespaces datetime negotiation is refused for.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum NamespacePolicy {
    /// Only the main (unprefixed) namespace is served.
    #[default]
    AllButMain,
    Listed(BTreeSet<String>),
}

impl NamespacePolicy {
    pub fn excludes(&self, title: &str) -> bool {
        match (self, namespace_of(title)) {
            (_, None) => false,
            (NamespacePolicy::AllButMain, Some(_)) => true,
            (NamespacePolicy::Listed(set), Some(ns)) => set.contains(ns),
        }
    }
}

/// The text before the first colon, if any.
pub fn namespace_of(title: &str) -> Option<&str> {
    title.split_once(':').map(|(ns, _)| ns)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerConfig {
    pub timemap_page_size: usize,
    pub error_page_type: ErrorPageType,
    pub negotiation_pattern: NegotiationPattern,
    pub recommended_relations: bool,
    pub excluded_namespaces: NamespacePolicy,
    /// Absolute URI prefix for every generated link, without a trailing slash.
    /// Its path, if any, is also the prefix the server routes under.
    pub base_url: String,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            timemap_page_size: DEFAULT_PAGE_SIZE,
            error_page_type: ErrorPageType::default(),
            negotiation_pattern: NegotiationPattern::default(),
            recommended_relations: false,
            excluded_namespaces: NamespacePolicy::default(),
            base_url: "http://127.0.0.1:8080".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl ServerConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut config = ServerConfig::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax(idx + 1))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        match key {
            "timemap_page_size" => {
                self.timemap_page_size = value.parse().ok().filter(|n| *n > 0).ok_or_else(bad)?;
            }
            "error_page_type" => self.error_page_type = value.parse().map_err(|_| bad())?,
            "negotiation_pattern" => self.negotiation_pattern = value.parse().map_err(|_| bad())?,
            "recommended_relations" => {
                self.recommended_relations = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad()),
                }
            }
            "excluded_namespaces" => self.excluded_namespaces = value.parse().map_err(|_| bad())?,
            "base_url" => self.base_url = value.to_string(),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.timemap_page_size == 0 {
            return Err(ConfigError::Invalid("timemap_page_size must be at least 1".into()));
        }
        if self.base_url.ends_with('/') {
            return Err(ConfigError::Invalid("base_url must not end with '/'".into()));
        }
        let url = Url::parse(&self.base_url)
            .map_err(|e| ConfigError::Invalid(format!("base_url is not an absolute URI: {e}")))?;
        if url.cannot_be_a_base() || url.query().is_some() || url.fragment().is_some() {
            return Err(ConfigError::Invalid("base_url must be a plain http(s) prefix".into()));
        }
        Ok(())
    }

    /// Path component of `base_url` ("" when it has none).
    pub fn base_path(&self) -> &str {
        let after_scheme = self.base_url.split_once("://").map_or("", |(_, rest)| rest);
        after_scheme.find('/').map_or("", |i| &after_scheme[i..])
    }
}

impl FromStr for ErrorPageType {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim_matches('\'') {
            "friendly" => Ok(ErrorPageType::Friendly),
            "traditional" => Ok(ErrorPageType::Traditional),
            _ => Err(()),
        }
    }
}

impl FromStr for NegotiationPattern {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim_matches('\'') {
            "302" => Ok(NegotiationPattern::P302),
            "200" => Ok(NegotiationPattern::P200),
            "1.1" => Ok(NegotiationPattern::P11),
            _ => Err(()),
        }
    }
}

impl FromStr for NamespacePolicy {
    type Err = ();
    /// `*` (every namespace but main), `none`, or a comma-separated list.
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "*" => Ok(NamespacePolicy::AllButMain),
            "none" | "" => Ok(NamespacePolicy::Listed(BTreeSet::new())),
            list => {
                let set: BTreeSet<String> = list.split(',').map(|n| n.trim().to_string()).collect();
                if set.iter().any(|n| n.is_empty() || n.contains(':')) {
                    return Err(());
                }
                Ok(NamespacePolicy::Listed(set))
            }
        }
    }
}

impl fmt::Display for NegotiationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NegotiationPattern::P302 => "302",
            NegotiationPattern::P200 => "200",
            NegotiationPattern::P11 => "1.1",
        })
    }
}

impl fmt::Display for ErrorPageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorPageType::Friendly => "friendly",
            ErrorPageType::Traditional => "traditional",
        })
    }
}
