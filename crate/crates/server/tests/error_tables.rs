mod common;

use common::{get, start, wiki_store, Exchange, TestServer};
use memento_server::ErrorPageType;

const FEB_30: &str = "Mon, 30 Feb 2014 00:00:00 GMT";

struct Row {
    target: &'static str,
    accept_datetime: Option<&'static str>,
    status: u16,
}

const TIMEGATE_ROWS: &[Row] = &[
    Row { target: "/timegate/", accept_datetime: None, status: 200 },
    Row { target: "/timegate/Daenerys", accept_datetime: Some("Mon, 30 Jun 2011 00:00:00 GMT"), status: 302 },
    Row { target: "/timegate/Daenerys", accept_datetime: Some(FEB_30), status: 400 },
    Row { target: "/timegate/Daenerys", accept_datetime: Some("30 Jun 2011"), status: 400 },
    Row { target: "/timegate/Talk:Daenerys_Targaryen", accept_datetime: None, status: 403 },
    Row { target: "/timegate/No_Such_Article", accept_datetime: None, status: 404 },
];

const TIMEMAP_ROWS: &[Row] = &[
    Row { target: "/timemap/Daenerys", accept_datetime: None, status: 200 },
    Row { target: "/timemap/20140230000000/-1/Daenerys", accept_datetime: None, status: 400 },
    Row { target: "/timemap/20140230000000/1/Daenerys", accept_datetime: None, status: 400 },
    Row { target: "/timemap/Talk:Daenerys_Targaryen", accept_datetime: None, status: 403 },
    Row { target: "/timemap/No_Such_Article", accept_datetime: None, status: 404 },
];

const OTHER_ROWS: &[Row] = &[
    Row { target: "/wiki/Talk:Daenerys_Targaryen", accept_datetime: None, status: 403 },
    Row { target: "/wiki/No_Such_Article", accept_datetime: None, status: 404 },
    Row { target: "/wiki/Daenerys?rev=999", accept_datetime: None, status: 404 },
    Row { target: "/wiki/Daenerys?rev=x", accept_datetime: None, status: 400 },
    Row { target: "/nowhere", accept_datetime: None, status: 404 },
    // A bad header is reported before the namespace and existence checks.
    Row { target: "/timegate/Talk:Daenerys_Targaryen", accept_datetime: Some(FEB_30), status: 400 },
    Row { target: "/timegate/No_Such_Article", accept_datetime: Some(FEB_30), status: 400 },
];

async fn fetch(server: &TestServer, row: &Row) -> Exchange {
    let headers: Vec<(&str, &str)> = row.accept_datetime.iter().map(|v| ("Accept-Datetime", *v)).collect();
    get(server.addr, row.target, &headers).await
}

async fn check_traditional(rows: &[Row]) {
    let server = start(wiki_store(), "", |c| c.error_page_type = ErrorPageType::Traditional).await;
    for row in rows {
        let r = fetch(&server, row).await;
        assert_eq!(r.status, row.status, "{} {:?}", row.target, row.accept_datetime);
        assert!(r.header("X-Memento-Error").is_none());
    }
}

async fn check_friendly(rows: &[Row]) {
    let server = start(wiki_store(), "", |_| {}).await;
    for row in rows {
        let r = fetch(&server, row).await;
        if row.status >= 400 {
            let code = row.status.to_string();
            assert_eq!(r.status, 200, "{}", row.target);
            assert_eq!(r.header("X-Memento-Error"), Some(code.as_str()), "{}", row.target);
            assert!(r.has_raw_header("X-Memento-Error"));
            assert!(r.body_text().contains(&format!("X-Memento-Error: {code}")));
        } else {
            assert_eq!(r.status, row.status, "{}", row.target);
            assert!(r.header("X-Memento-Error").is_none());
        }
    }
}

#[tokio::test]
async fn timegate_statuses_traditional() {
    check_traditional(TIMEGATE_ROWS).await;
}

#[tokio::test]
async fn timemap_statuses_traditional() {
    check_traditional(TIMEMAP_ROWS).await;
}

#[tokio::test]
async fn other_statuses_traditional() {
    check_traditional(OTHER_ROWS).await;
}

#[tokio::test]
async fn friendly_mode_softens_every_error() {
    check_friendly(TIMEGATE_ROWS).await;
    check_friendly(TIMEMAP_ROWS).await;
    check_friendly(OTHER_ROWS).await;
}

#[tokio::test]
async fn usage_page_describes_timegate() {
    let server = start(wiki_store(), "", |_| {}).await;
    let r = get(server.addr, "/timegate/", &[]).await;
    assert_eq!(r.status, 200);
    assert!(r.body_text().contains("Accept-Datetime"));
}

#[tokio::test]
async fn bad_header_error_varies() {
    let server = start(wiki_store(), "", |c| c.error_page_type = ErrorPageType::Traditional).await;
    let r = get(server.addr, "/timegate/Daenerys", &[("Accept-Datetime", FEB_30)]).await;
    assert_eq!(r.header("Vary"), Some("Accept-Datetime"));
    let r = get(server.addr, "/timegate/No_Such_Article", &[]).await;
    assert!(r.header("Vary").is_none());
}

#[tokio::test]
async fn other_methods_are_refused() {
    let server = start(wiki_store(), "", |_| {}).await;
    let r = common::request(server.addr, "POST", "/timegate/Daenerys", &[("Content-Length", "0")]).await;
    assert_eq!(r.status, 405);
    assert_eq!(r.header("Allow"), Some("GET, HEAD"));
}

#[tokio::test]
async fn namespace_policy_is_configurable() {
    let server = start(wiki_store(), "", |c| {
        c.error_page_type = ErrorPageType::Traditional;
        c.excluded_namespaces = "User".parse().unwrap();
    })
    .await;
    let r = get(server.addr, "/timemap/Talk:Daenerys_Targaryen", &[]).await;
    assert_eq!(r.status, 200);
    let r = get(server.addr, "/timemap/User:Nobody", &[]).await;
    assert_eq!(r.status, 403);
}
