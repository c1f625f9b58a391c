//! Paged TimeMaps.
//!
//! A page holds at most `page_size` mementos. Its neighbors are addressed by
//! pivots: the earlier neighbor pages backward from this page's oldest
//! memento (`/{from}/-1/`), the later one forward from its newest memento
//! (`/{until}/1/`). A neighbor link is emitted only when mementos exist on
//! that side.

use chrono::{DateTime, Utc};

use crate::linkrel::{LinkEntry, LINK_FORMAT};
use crate::store::{PageHistory, Revision};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotDirection {
    /// `/-1/`: mementos strictly before the pivot.
    Descending,
    /// `/1/`: mementos strictly after the pivot.
    Ascending,
}

impl PivotDirection {
    pub fn as_path_segment(self) -> &'static str {
        match self {
            PivotDirection::Descending => "-1",
            PivotDirection::Ascending => "1",
        }
    }
}

/// Which slice of a history a TimeMap page shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMapSelection {
    Latest,
    Pivot(DateTime<Utc>, PivotDirection),
}

/// How URIs for a title are spelled by whoever serves them.
pub trait UriScheme {
    fn original(&self, title: &str) -> String;
    fn memento(&self, title: &str, rev_id: u64) -> String;
    fn timegate(&self, title: &str) -> String;
    fn timemap(&self, title: &str) -> String;
    fn timemap_pivot(&self, title: &str, pivot: DateTime<Utc>, direction: PivotDirection) -> String;

    fn timemap_for(&self, title: &str, selection: TimeMapSelection) -> String {
        match selection {
            TimeMapSelection::Latest => self.timemap(title),
            TimeMapSelection::Pivot(p, d) => self.timemap_pivot(title, p, d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMapMemento {
    pub uri: String,
    pub rev_id: u64,
    pub datetime: DateTime<Utc>,
    pub is_first: bool,
    pub is_last: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborPage {
    pub uri: String,
    pub pivot: DateTime<Utc>,
    pub direction: PivotDirection,
    pub from: DateTime<Utc>,
    pub until: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMapPage {
    pub title: String,
    pub self_uri: String,
    pub timegate_uri: String,
    pub original_uri: String,
    /// Ascending by datetime; never empty.
    pub mementos: Vec<TimeMapMemento>,
    /// Earlier page (`/-1/`), if any mementos precede this page.
    pub previous: Option<NeighborPage>,
    /// Later page (`/1/`), if any mementos follow this page.
    pub next: Option<NeighborPage>,
    /// Mark the history's endpoints with `first`/`last` rels.
    pub recommended_relations: bool,
}

impl TimeMapPage {
    pub fn from(&self) -> DateTime<Utc> {
        self.mementos[0].datetime
    }

    pub fn until(&self) -> DateTime<Utc> {
        self.mementos[self.mementos.len() - 1].datetime
    }

    pub fn prev_pivot(&self) -> Option<DateTime<Utc>> {
        self.previous.as_ref().map(|n| n.pivot)
    }

    pub fn next_pivot(&self) -> Option<DateTime<Utc>> {
        self.next.as_ref().map(|n| n.pivot)
    }

    /// Entries in body order: self, neighbors, timegate, original, mementos.
    pub fn link_entries(&self) -> Vec<LinkEntry> {
        let mut out = Vec::with_capacity(self.mementos.len() + 5);
        out.push(
            LinkEntry::new(self.self_uri.clone(), &["self"])
                .with_type(LINK_FORMAT)
                .with_range(self.from(), self.until()),
        );
        for n in [&self.previous, &self.next].into_iter().flatten() {
            out.push(
                LinkEntry::new(n.uri.clone(), &["timemap"])
                    .with_type(LINK_FORMAT)
                    .with_range(n.from, n.until),
            );
        }
        out.push(LinkEntry::new(self.timegate_uri.clone(), &["timegate"]));
        out.push(LinkEntry::new(self.original_uri.clone(), &["original", "latest-version"]));
        for m in &self.mementos {
            let rels = memento_rels(self.recommended_relations && m.is_first, self.recommended_relations && m.is_last);
            out.push(LinkEntry::new(m.uri.clone(), &rels).with_datetime(m.datetime));
        }
        out
    }
}

/// Rel tokens for a memento entry, with the optional endpoint markers.
pub fn memento_rels(first: bool, last: bool) -> Vec<&'static str> {
    let mut rels = Vec::with_capacity(3);
    if first {
        rels.push("first");
    }
    if last {
        rels.push("last");
    }
    rels.push("memento");
    rels
}

fn window(history: &PageHistory, selection: TimeMapSelection, page_size: usize) -> &[Revision] {
    match selection {
        TimeMapSelection::Latest => history.latest_window(page_size),
        TimeMapSelection::Pivot(p, PivotDirection::Descending) => history.range_before(p, page_size),
        TimeMapSelection::Pivot(p, PivotDirection::Ascending) => history.range_after(p, page_size),
    }
}

fn neighbor(
    history: &PageHistory,
    uris: &dyn UriScheme,
    pivot: DateTime<Utc>,
    direction: PivotDirection,
    page_size: usize,
) -> Option<NeighborPage> {
    let revs = window(history, TimeMapSelection::Pivot(pivot, direction), page_size);
    let (first, last) = (revs.first()?, revs.last()?);
    Some(NeighborPage {
        uri: uris.timemap_pivot(history.title(), pivot, direction),
        pivot,
        direction,
        from: first.timestamp,
        until: last.timestamp,
    })
}

/// Builds one TimeMap page, or `None` when the selection holds no mementos.
pub fn build_page(
    history: &PageHistory,
    selection: TimeMapSelection,
    page_size: usize,
    uris: &dyn UriScheme,
    recommended_relations: bool,
) -> Option<TimeMapPage> {
    let revs = window(history, selection, page_size);
    if revs.is_empty() {
        return None;
    }
    let title = history.title();
    let (first_id, last_id) = (history.first().rev_id, history.last().rev_id);
    let mementos = revs
        .iter()
        .map(|r| TimeMapMemento {
            uri: uris.memento(title, r.rev_id),
            rev_id: r.rev_id,
            datetime: r.timestamp,
            is_first: r.rev_id == first_id,
            is_last: r.rev_id == last_id,
        })
        .collect::<Vec<_>>();
    let from = revs[0].timestamp;
    let until = revs[revs.len() - 1].timestamp;
    Some(TimeMapPage {
        title: title.to_string(),
        self_uri: uris.timemap_for(title, selection),
        timegate_uri: uris.timegate(title),
        original_uri: uris.original(title),
        mementos,
        previous: neighbor(history, uris, from, PivotDirection::Descending, page_size),
        next: neighbor(history, uris, until, PivotDirection::Ascending, page_size),
        recommended_relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negotiator::{format_compact, instant_from_secs};

    struct Plain;

    impl UriScheme for Plain {
        fn original(&self, t: &str) -> String {
            format!("/wiki/{t}")
        }
        fn memento(&self, t: &str, id: u64) -> String {
            format!("/wiki/{t}?rev={id}")
        }
        fn timegate(&self, t: &str) -> String {
            format!("/timegate/{t}")
        }
        fn timemap(&self, t: &str) -> String {
            format!("/timemap/{t}")
        }
        fn timemap_pivot(&self, t: &str, p: DateTime<Utc>, d: PivotDirection) -> String {
            format!("/timemap/{}/{}/{t}", format_compact(p), d.as_path_segment())
        }
    }

    fn ten() -> PageHistory {
        let revs = (1..=10)
            .map(|i| Revision::new(i, instant_from_secs(i as i64 * 1000).unwrap(), "text/plain", vec![]))
            .collect();
        PageHistory::new("X", revs).unwrap()
    }

    #[test]
    fn latest_page_links_backward_only() {
        let h = ten();
        let page = build_page(&h, TimeMapSelection::Latest, 3, &Plain, false).unwrap();
        let ids: Vec<u64> = page.mementos.iter().map(|m| m.rev_id).collect();
        assert_eq!(ids, vec![8, 9, 10]);
        assert_eq!(page.prev_pivot(), Some(h.revisions()[7].timestamp));
        assert!(page.next.is_none());
        let prev = page.previous.unwrap();
        assert_eq!((prev.from, prev.until), (h.revisions()[4].timestamp, h.revisions()[6].timestamp));
    }

    #[test]
    fn single_revision_has_no_neighbors() {
        let h = PageHistory::new("X", vec![Revision::new(1, instant_from_secs(5).unwrap(), "t", vec![])]).unwrap();
        let page = build_page(&h, TimeMapSelection::Latest, 500, &Plain, false).unwrap();
        assert!(page.previous.is_none() && page.next.is_none());
        assert_eq!(page.link_entries().len(), 4);
    }

    #[test]
    fn empty_selection_yields_none() {
        let h = ten();
        let before_all = TimeMapSelection::Pivot(instant_from_secs(1000).unwrap(), PivotDirection::Descending);
        assert!(build_page(&h, before_all, 3, &Plain, false).is_none());
    }

    #[test]
    fn recommended_relations_mark_endpoints() {
        let h = ten();
        let page = build_page(&h, TimeMapSelection::Latest, 10, &Plain, true).unwrap();
        let entries = page.link_entries();
        let mementos: Vec<_> = entries.iter().filter(|e| e.has_rel("memento")).collect();
        assert_eq!(mementos[0].rels, vec!["first", "memento"]);
        assert_eq!(mementos[9].rels, vec!["last", "memento"]);
        assert_eq!(mementos[5].rels, vec!["memento"]);
    }
}
