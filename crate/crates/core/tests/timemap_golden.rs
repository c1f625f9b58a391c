use chrono::{DateTime, TimeZone, Utc};
use memento_core::negotiator::format_compact;
use memento_core::timemap::{build_page, PivotDirection, TimeMapSelection, UriScheme};
use memento_core::{parse_link, render_timemap, PageHistory, Revision};

const RAW: &str = include_str!("golden/timemap_example_raw.txt");
const CANONICAL: &str = include_str!("golden/timemap_canonical.txt");

/// MediaWiki-style `index.php` URIs.
struct MediaWikiUris(&'static str);

impl UriScheme for MediaWikiUris {
    fn original(&self, t: &str) -> String {
        format!("{}/{t}", self.0)
    }
    fn memento(&self, t: &str, id: u64) -> String {
        format!("{}?title={t}&oldid={id}", self.0)
    }
    fn timegate(&self, t: &str) -> String {
        format!("{}/Special:TimeGate/{t}", self.0)
    }
    fn timemap(&self, t: &str) -> String {
        format!("{}/Special:TimeMap/{t}", self.0)
    }
    fn timemap_pivot(&self, t: &str, p: DateTime<Utc>, d: PivotDirection) -> String {
        format!("{}/Special:TimeMap/{}/{}/{t}", self.0, format_compact(p), d.as_path_segment())
    }
}

fn at(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, mo, d, h, mi, s).unwrap()
}

/// A history whose middle page reproduces the example TimeMap. Revisions
/// outside the example's memento list are invented fillers.
fn daenerys() -> PageHistory {
    let mut revs = vec![];
    let mut add = |id: u64, t: DateTime<Utc>| revs.push(Revision::new(id, t, "text/x-wiki", vec![]));
    // Nine earlier revisions: the previous page spans exactly these.
    add(80001, at(2012, 9, 19, 16, 23, 26));
    for (i, day) in [1u32, 5, 9, 13, 17, 21, 25].iter().enumerate() {
        add(80002 + i as u64, at(2012, 11, *day, 12, 0, 0));
    }
    add(80009, at(2013, 2, 2, 1, 18, 43));
    // The example page.
    add(90020, at(2013, 2, 23, 1, 55, 23));
    add(91783, at(2013, 3, 13, 16, 22, 23));
    add(93106, at(2013, 3, 29, 23, 25, 8));
    add(93753, at(2013, 4, 11, 1, 55, 33));
    add(94427, at(2013, 4, 25, 5, 30, 44));
    add(94605, at(2013, 4, 26, 16, 52, 8));
    add(95821, at(2013, 5, 7, 19, 30, 38));
    add(95824, at(2013, 5, 7, 19, 40, 25));
    add(96500, at(2013, 7, 11, 20, 36, 8));
    // Later revisions.
    add(96600, at(2013, 7, 11, 20, 37, 56));
    add(97000, at(2013, 8, 15, 12, 0, 0));
    add(98000, at(2013, 9, 27, 20, 48, 24));
    PageHistory::new("Daenerys_Targaryen", revs).unwrap()
}

#[test]
fn paged_timemap_renders_byte_exact() {
    let uris = MediaWikiUris("http://ws-dl-05.cs.odu.edu/demo/index.php");
    let selection = TimeMapSelection::Pivot(at(2013, 7, 11, 20, 37, 56), PivotDirection::Descending);
    let page = build_page(&daenerys(), selection, 9, &uris, false).unwrap();
    assert_eq!(render_timemap(&page), CANONICAL);
}

#[test]
fn example_timemap_parses_into_expected_classes() {
    let entries = parse_link(RAW).unwrap();
    assert_eq!(entries.len(), 13);
    let count = |rel: &str| entries.iter().filter(|e| e.has_rel(rel)).count();
    assert_eq!(count("self"), 1);
    assert_eq!(count("timemap"), 2);
    assert_eq!(count("timegate"), 1);
    assert_eq!(count("original"), 1);
    assert_eq!(count("memento"), 8);
    assert_eq!(entries[0].from, Some(at(2013, 2, 23, 1, 55, 23)));
    assert_eq!(entries[0].until, Some(at(2013, 7, 11, 20, 36, 8)));
    assert_eq!(entries[1].until, Some(at(2013, 2, 2, 1, 18, 43)));
    assert_eq!(entries[4].rels, vec!["original", "latest-version"]);
    assert_eq!(entries[5].datetime, Some(at(2013, 2, 23, 1, 55, 23)));
    assert_eq!(entries[12].datetime, Some(at(2013, 5, 7, 19, 40, 25)));
    assert!(entries[5].target.ends_with("oldid=90020"));
}

#[test]
fn raw_and_canonical_agree_on_shared_entries() {
    let raw = parse_link(RAW).unwrap();
    let canonical = parse_link(CANONICAL).unwrap();
    assert_eq!(&canonical[..raw.len()], &raw[..]);
}
