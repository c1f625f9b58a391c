//! Which server deployment a logged URI hit, and which page it was for.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Distinct TimeGate (Pattern 2.1).
    Pattern21,
    /// Self-redirecting page (Pattern 1.1).
    Pattern11,
    /// Baseline without any Memento support.
    NotInstalled,
    /// Memento support with every recommended relation enabled.
    AllHeaders,
    /// Memento support with the default options.
    Default,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Pattern21 => "pattern21",
            Variant::Pattern11 => "pattern11",
            Variant::NotInstalled => "not-installed",
            Variant::AllHeaders => "all-headers",
            Variant::Default => "default",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "pattern21" => Variant::Pattern21,
            "pattern11" => Variant::Pattern11,
            "not-installed" => Variant::NotInstalled,
            "all-headers" => Variant::AllHeaders,
            "default" => Variant::Default,
            _ => return Err(format!("unknown variant {s:?}")),
        })
    }
}

/// Ordered URI path prefixes; the first matching prefix wins, so longer
/// prefixes must precede shorter ones they extend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantTable {
    rules: Vec<(String, Variant)>,
}

impl VariantTable {
    pub fn new(rules: Vec<(String, Variant)>) -> Self {
        VariantTable { rules }
    }

    /// `/demo-special` is the distinct-TimeGate deployment, `/demo` the
    /// self-redirecting one.
    pub fn timegate_default() -> Self {
        VariantTable::new(vec![
            ("/demo-special".into(), Variant::Pattern21),
            ("/demo".into(), Variant::Pattern11),
        ])
    }

    pub fn pages_default() -> Self {
        VariantTable::new(vec![
            ("/demo-not-installed".into(), Variant::NotInstalled),
            ("/demo-302-recommended-relations".into(), Variant::AllHeaders),
            ("/demo".into(), Variant::Default),
        ])
    }

    pub fn rules(&self) -> &[(String, Variant)] {
        &self.rules
    }

    pub fn classify(&self, uri: &str) -> Option<Variant> {
        let path = path_of(uri);
        self.rules.iter().find(|(prefix, _)| path.starts_with(prefix.as_str())).map(|(_, v)| *v)
    }
}

impl FromStr for VariantTable {
    type Err = String;
    /// `prefix=variant,prefix=variant,...`
    fn from_str(s: &str) -> Result<Self, String> {
        let rules = s
            .split(',')
            .map(|rule| {
                let (prefix, variant) =
                    rule.split_once('=').ok_or_else(|| format!("expected prefix=variant, got {rule:?}"))?;
                Ok((prefix.trim().to_string(), variant.trim().parse()?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        if rules.is_empty() {
            return Err("empty variant table".into());
        }
        Ok(VariantTable { rules })
    }
}

/// Path and query of a URI that may be absolute.
fn path_of(uri: &str) -> &str {
    match uri.split_once("://") {
        Some((_, rest)) => rest.find('/').map_or("/", |i| &rest[i..]),
        None => uri,
    }
}

/// The page a URI is about: the `title=` query parameter when present,
/// otherwise the last path segment.
pub fn page_name(uri: &str) -> Option<String> {
    let target = path_of(uri);
    let (path, query) = match target.split_once('?') {
        Some((p, q)) => (p, Some(q)),
        None => (target, None),
    };
    if let Some(q) = query {
        if let Some(title) = q.split('&').find_map(|kv| kv.strip_prefix("title=")) {
            return (!title.is_empty()).then(|| title.to_string());
        }
    }
    let last = path.rsplit('/').next()?;
    (!last.is_empty()).then(|| last.to_string())
}
