#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use memento_core::Store;
use memento_server::{MementoService, ServerConfig};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::task::JoinHandle;

pub const WIKI_DUMP: &str = include_str!("../../../../fixtures/wiki.dump");

pub fn wiki_store() -> Store {
    Store::from_reader(WIKI_DUMP.as_bytes()).unwrap()
}

pub struct TestServer {
    pub addr: SocketAddr,
    pub base: String,
    task: JoinHandle<std::io::Result<()>>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

/// Starts a server on an ephemeral port. `tweak` sees a config whose
/// `base_url` already points at that port plus `prefix`.
pub async fn start(store: Store, prefix: &str, tweak: impl FnOnce(&mut ServerConfig)) -> TestServer {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let base = format!("http://{addr}{prefix}");
    let mut config = ServerConfig { base_url: base.clone(), ..Default::default() };
    tweak(&mut config);
    config.validate().unwrap();
    let service = Arc::new(MementoService::new(store, config));
    let task = tokio::spawn(memento_server::serve(listener, service));
    TestServer { addr, base, task }
}

/// A response as it appeared on the wire, header names unnormalized.
#[derive(Debug)]
pub struct Exchange {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl Exchange {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }

    pub fn has_raw_header(&self, exact_name: &str) -> bool {
        self.headers.iter().any(|(n, _)| n == exact_name)
    }

    pub fn body_text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub async fn request(addr: SocketAddr, method: &str, target: &str, headers: &[(&str, &str)]) -> Exchange {
    let mut stream = TcpStream::connect(addr).await.unwrap();
    let mut req = format!("{method} {target} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n");
    for (n, v) in headers {
        req.push_str(&format!("{n}: {v}\r\n"));
    }
    req.push_str("\r\n");
    stream.write_all(req.as_bytes()).await.unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).await.unwrap();
    parse_response(&raw)
}

pub async fn get(addr: SocketAddr, target: &str, headers: &[(&str, &str)]) -> Exchange {
    request(addr, "GET", target, headers).await
}

fn parse_response(raw: &[u8]) -> Exchange {
    let split = raw.windows(4).position(|w| w == b"\r\n\r\n").expect("header terminator");
    let head = std::str::from_utf8(&raw[..split]).unwrap();
    let mut lines = head.split("\r\n");
    let status_line = lines.next().unwrap();
    let status = status_line.split(' ').nth(1).unwrap().parse().unwrap();
    let headers = lines
        .map(|l| {
            let (n, v) = l.split_once(':').unwrap();
            (n.to_string(), v.trim().to_string())
        })
        .collect();
    Exchange { status, headers, body: raw[split + 4..].to_vec() }
}

/// Path and query of an absolute URI served by `server`.
pub fn local_target(server: &TestServer, uri: &str) -> String {
    let rest = uri.strip_prefix(&format!("http://{}", server.addr)).expect("URI on this server");
    rest.to_string()
}
