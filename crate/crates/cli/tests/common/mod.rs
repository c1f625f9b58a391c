#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use chrono::{DateTime, Utc};
use memento_core::{PageHistory, Revision, Store};
use memento_server::{MementoService, ServerConfig};
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

pub const WIKI_DUMP: &str = include_str!("../../../../fixtures/wiki.dump");

pub fn wiki_store() -> Store {
    Store::from_reader(WIKI_DUMP.as_bytes()).unwrap()
}

pub fn at(secs: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(secs, 0).unwrap()
}

/// `n` revisions `step` seconds apart, ids 100, 101, ...
pub fn spaced_history(title: &str, n: usize, start: i64, step: i64) -> PageHistory {
    let revs = (0..n)
        .map(|i| Revision::new(100 + i as u64, at(start + i as i64 * step), "text/plain", format!("{title} v{i}")))
        .collect();
    PageHistory::new(title, revs).unwrap()
}

pub struct TestServer {
    pub addr: SocketAddr,
    pub base: String,
    task: JoinHandle<std::io::Result<()>>,
}

impl TestServer {
    pub fn original(&self, title: &str) -> String {
        format!("{}/wiki/{title}", self.base)
    }

    pub fn timemap(&self, title: &str) -> String {
        format!("{}/timemap/{title}", self.base)
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

pub async fn start(store: Store, tweak: impl FnOnce(&mut ServerConfig)) -> TestServer {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let base = format!("http://{addr}");
    let mut config = ServerConfig { base_url: base.clone(), ..Default::default() };
    tweak(&mut config);
    config.validate().unwrap();
    let task = tokio::spawn(memento_server::serve(listener, Arc::new(MementoService::new(store, config))));
    TestServer { addr, base, task }
}

/// A server that knows nothing about Memento.
pub async fn start_plain() -> (String, JoinHandle<()>) {
    let app = Router::new().route("/page", get(|| async { "just a page".into_response() }));
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let url = format!("http://{}/page", listener.local_addr().unwrap());
    (url, tokio::spawn(async move { axum::serve(listener, app).await.unwrap() }))
}
