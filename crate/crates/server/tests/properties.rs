//! Whole-service properties, exercised in-process through
//! [`MementoService::handle`].

use chrono::{DateTime, Duration, TimeZone, Utc};
use http_body_util::BodyExt;
use hyper::header::{HeaderMap, HeaderValue};
use hyper::{Method, Response};
use memento_core::{format_http_datetime, parse_http_datetime, parse_link, LinkEntry, PageHistory, Revision, Store};
use memento_server::{ErrorPageType, MementoService, NegotiationPattern, ServerConfig};
use proptest::prelude::*;

const BASE: &str = "http://memento.test";

struct Reply {
    status: u16,
    headers: HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).map(|v| v.to_str().unwrap())
    }
}

fn call(svc: &MementoService, target: &str, accept_datetime: Option<&str>) -> Reply {
    let mut headers = HeaderMap::new();
    if let Some(v) = accept_datetime {
        headers.insert("accept-datetime", HeaderValue::from_str(v).unwrap());
    }
    let resp: Response<_> = svc.handle(&Method::GET, &target.parse().unwrap(), &headers);
    let status = resp.status().as_u16();
    let (parts, body) = resp.into_parts();
    let rt = tokio::runtime::Builder::new_current_thread().build().unwrap();
    let body = rt.block_on(body.collect()).unwrap().to_bytes().to_vec();
    Reply { status, headers: parts.headers, body }
}

fn local(uri: &str) -> &str {
    uri.strip_prefix(BASE).unwrap()
}

fn rev_of(uri: &str) -> u64 {
    uri.rsplit_once("?rev=").unwrap().1.parse().unwrap()
}

fn instant(secs: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(secs, 0).unwrap()
}

/// `n` revisions with increasing ids; every seventh shares its predecessor's
/// timestamp so windows meet tied groups.
fn history(title: &str, n: usize) -> PageHistory {
    let mut t = 1_200_000_000i64;
    let revs = (1..=n as u64)
        .map(|id| {
            if id % 7 != 0 {
                t += 3_600 + (id as i64 * 37) % 500;
            }
            Revision::new(id, instant(t), "text/plain", format!("rev {id}").into_bytes())
        })
        .collect();
    PageHistory::new(title, revs).unwrap()
}

fn service(store: Store, tweak: impl FnOnce(&mut ServerConfig)) -> MementoService {
    let mut config = ServerConfig { base_url: BASE.into(), ..Default::default() };
    tweak(&mut config);
    MementoService::new(store, config)
}

struct Page {
    entries: Vec<LinkEntry>,
}

impl Page {
    fn fetch(svc: &MementoService, target: &str) -> Page {
        let r = call(svc, target, None);
        assert_eq!(r.status, 200, "{target}");
        assert_eq!(r.header("content-type"), Some("application/link-format"));
        Page { entries: parse_link(std::str::from_utf8(&r.body).unwrap()).unwrap() }
    }

    fn mementos(&self) -> Vec<(u64, DateTime<Utc>)> {
        self.entries.iter().filter(|e| e.has_rel("memento")).map(|e| (rev_of(&e.target), e.datetime.unwrap())).collect()
    }

    fn neighbor(&self, segment: &str) -> Option<&LinkEntry> {
        self.entries
            .iter()
            .find(|e| e.has_rel("timemap") && !e.has_rel("self") && e.target.contains(segment))
    }

    fn check_bounds(&self) {
        let m = self.mementos();
        assert!(!m.is_empty());
        assert!(m.windows(2).all(|w| w[0].1 <= w[1].1), "ascending within page");
        let me = self.entries.iter().find(|e| e.has_rel("self")).unwrap();
        assert_eq!(me.from, Some(m[0].1));
        assert_eq!(me.until, Some(m[m.len() - 1].1));
    }
}

/// Follows neighbor links from `start` in one direction, checking that each
/// advertised from/until matches the page actually fetched.
fn walk(svc: &MementoService, start: &str, segment: &str) -> Vec<Vec<(u64, DateTime<Utc>)>> {
    let mut pages = vec![];
    let mut target = start.to_string();
    loop {
        let page = Page::fetch(svc, &target);
        page.check_bounds();
        pages.push(page.mementos());
        let Some(next) = page.neighbor(segment) else { break };
        let (from, until) = (next.from, next.until);
        target = local(&next.target).to_string();
        let peek = Page::fetch(svc, &target).mementos();
        assert_eq!(from, Some(peek[0].1));
        assert_eq!(until, Some(peek[peek.len() - 1].1));
        assert!(pages.len() <= 100, "walk does not terminate");
    }
    pages
}

#[test]
fn paging_walk_enumerates_every_revision_once() {
    for n in 1..=50usize {
        let h = history("P", n);
        // Brute-force oracle: every revision, sorted by (timestamp, id).
        let mut expected: Vec<(u64, DateTime<Utc>)> = h.revisions().iter().map(|r| (r.rev_id, r.timestamp)).collect();
        expected.sort_by_key(|(id, t)| (*t, *id));
        let first = h.first().timestamp;
        let store = Store::from_histories([h]);
        for size in [1usize, 2, 3, 500] {
            let svc = service(store.clone(), |c| c.timemap_page_size = size);

            let mut backward = walk(&svc, "/timemap/P", "/-1/");
            backward.reverse();
            let flat: Vec<_> = backward.concat();
            assert_eq!(flat, expected, "backward n={n} size={size}");

            let before_all = (first - Duration::seconds(1)).format("%Y%m%d%H%M%S");
            let forward = walk(&svc, &format!("/timemap/{before_all}/1/P"), "/1/");
            assert_eq!(forward.concat(), expected, "forward n={n} size={size}");

            if size == 500 {
                assert_eq!(backward.len(), 1);
            }
        }
    }
}

#[test]
fn single_revision_timemap_has_no_neighbors() {
    let svc = service(Store::from_histories([history("One", 1)]), |_| {});
    let page = Page::fetch(&svc, "/timemap/One");
    assert_eq!(page.mementos().len(), 1);
    assert!(page.neighbor("/-1/").is_none() && page.neighbor("/1/").is_none());
}

#[test]
fn ten_revisions_page_size_three() {
    let h = history("X", 10);
    let rev8 = h.revision(8).unwrap().timestamp;
    let svc = service(Store::from_histories([h]), |c| c.timemap_page_size = 3);
    let page = Page::fetch(&svc, "/timemap/X");
    let ids: Vec<u64> = page.mementos().iter().map(|m| m.0).collect();
    assert_eq!(ids, vec![8, 9, 10]);
    let prev = page.neighbor("/-1/").unwrap();
    assert!(prev.target.contains(&format!("/timemap/{}/-1/X", rev8.format("%Y%m%d%H%M%S"))));
    assert!(page.neighbor("/1/").is_none());
}

fn pattern_strategy() -> impl Strategy<Value = NegotiationPattern> {
    prop_oneof![Just(NegotiationPattern::P302), Just(NegotiationPattern::P200), Just(NegotiationPattern::P11)]
}

fn header_strategy() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        Just(None),
        (1_100_000_000i64..1_400_000_000).prop_map(|s| Some(format_http_datetime(instant(s)))),
        Just(Some("Mon, 30 Feb 2014 00:00:00 GMT".to_string())),
        Just(Some("yesterday".to_string())),
    ]
}

fn target_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![
        "/wiki/P",
        "/wiki/P?rev=3",
        "/wiki/P?rev=99",
        "/timegate/P",
        "/timegate/",
        "/timemap/P",
        "/timemap/20090101000000/1/P",
        "/wiki/Missing",
        "/timegate/Missing",
        "/timegate/Talk:P",
        "/wiki/Talk:P",
    ])
}

fn is_success(r: &Reply) -> bool {
    (r.status == 200 || r.status == 302) && r.header("x-memento-error").is_none()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// A 302's Location, dereferenced, carries a datetime at or before the
    /// request, or the first memento's when the request predates history.
    #[test]
    fn timegate_redirects_honor_target(n in 1usize..30, secs in 1_100_000_000i64..1_400_000_000, pattern in prop_oneof![Just(NegotiationPattern::P302), Just(NegotiationPattern::P11)]) {
        let h = history("P", n);
        let first = h.first().timestamp;
        let svc = service(Store::from_histories([h]), |c| c.negotiation_pattern = pattern);
        let target = format_http_datetime(instant(secs));
        let gate = if pattern == NegotiationPattern::P302 { "/timegate/P" } else { "/wiki/P" };
        let r = call(&svc, gate, Some(&target));
        prop_assert_eq!(r.status, 302);
        let m = call(&svc, local(r.header("location").unwrap()), None);
        prop_assert_eq!(m.status, 200);
        let served = parse_http_datetime(m.header("memento-datetime").unwrap()).unwrap().instant;
        if instant(secs) < first {
            prop_assert_eq!(served, first);
        } else {
            prop_assert!(served <= instant(secs));
        }
    }

    /// Vary: Accept-Datetime appears exactly where the answer depended on it.
    #[test]
    fn vary_marks_datetime_dependence(pattern in pattern_strategy(), target in target_strategy(), header in header_strategy(), friendly in any::<bool>()) {
        let store = Store::from_histories([history("P", 5), history("Talk:P", 2)]);
        let svc = service(store, |c| {
            c.negotiation_pattern = pattern;
            c.error_page_type = if friendly { ErrorPageType::Friendly } else { ErrorPageType::Traditional };
        });
        let r = call(&svc, target, header.as_deref());
        let header_ok = header.as_deref().is_none_or(|h| parse_http_datetime(h).is_ok());
        let negotiates = (target.starts_with("/timegate/") && target != "/timegate/")
            || (target.starts_with("/wiki/") && !target.contains("?rev=") && pattern.self_negotiating());
        let depended = negotiates && (is_success(&r) || !header_ok);
        prop_assert_eq!(r.header("vary") == Some("Accept-Datetime"), depended,
            "{} {:?} {:?} status {}", target, header, pattern, r.status);
    }

    /// Under the distinct-TimeGate pattern the page URI ignores Accept-Datetime.
    #[test]
    fn p302_page_uri_is_cache_safe(target in prop::sample::select(vec!["/wiki/P", "/wiki/P?rev=2", "/wiki/Missing", "/timemap/P"]), header in header_strategy()) {
        let svc = service(Store::from_histories([history("P", 5)]), |_| {});
        let plain = call(&svc, target, None);
        let with = call(&svc, target, header.as_deref());
        prop_assert_eq!(plain.status, with.status);
        prop_assert_eq!(&plain.headers, &with.headers);
        prop_assert_eq!(plain.body, with.body);
    }

    /// Error mode changes nothing on success paths.
    #[test]
    fn error_modes_agree_on_success(pattern in pattern_strategy(), target in target_strategy(), header in header_strategy(), recommended in any::<bool>()) {
        let store = Store::from_histories([history("P", 5)]);
        let mk = |mode| service(store.clone(), |c| {
            c.negotiation_pattern = pattern;
            c.error_page_type = mode;
            c.recommended_relations = recommended;
        });
        let t = call(&mk(ErrorPageType::Traditional), target, header.as_deref());
        let f = call(&mk(ErrorPageType::Friendly), target, header.as_deref());
        if t.status < 400 {
            prop_assert_eq!(t.status, f.status);
            for name in ["link", "memento-datetime", "location", "content-location", "vary"] {
                prop_assert_eq!(t.header(name), f.header(name), "{}", name);
            }
            prop_assert_eq!(t.body, f.body);
        } else {
            prop_assert_eq!(f.status, 200);
            let code = t.status.to_string();
            prop_assert_eq!(f.header("x-memento-error"), Some(code.as_str()));
        }
    }
}
