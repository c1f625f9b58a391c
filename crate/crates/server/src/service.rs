use std::convert::Infallible;
use std::future::Future;
use std::io;
use std::sync::Arc;

use hyper::body::Incoming;
use hyper::header::{HeaderMap, HeaderValue, ALLOW, CACHE_CONTROL, CONTENT_LOCATION, LINK, LOCATION, VARY};
use hyper::server::conn::http1;
use hyper::service::service_fn;
use hyper::{Method, Request, Response, StatusCode, Uri};
use hyper_util::rt::TokioIo;
use memento_core::{
    build_page, format_http_datetime, negotiate, parse_http_datetime, render_link_header, render_timemap,
    LinkEntry, PageHistory, Revision, Store, TargetDatetime, UriScheme, LINK_FORMAT,
};
use tokio::net::TcpListener;

use crate::config::{NegotiationPattern, ServerConfig};
use crate::respond::{header_value, render_error, with_body, Body, ErrorCondition, MEMENTO_DATETIME, TEXT_PLAIN};
use crate::route::{route, ResourceKind, Route, RouteError, ACCEPT_DATETIME};
use crate::uris::ServerUris;

const USAGE: &str = "TimeGate usage\n\n\
GET /timegate/{title} with an Accept-Datetime header in RFC 1123 form, for example\n\
\n    Accept-Datetime: Mon, 30 Jun 2011 00:00:00 GMT\n\n\
The response is a 302 redirect to the revision of {title} that was current at that\n\
datetime. Without the header the latest revision is selected.\n";

/// Stateless request handler over an immutable store.
#[derive(Debug, Clone)]
pub struct MementoService {
    store: Arc<Store>,
    config: Arc<ServerConfig>,
    uris: ServerUris,
}

/// A failure before a response could be assembled; rendered per error mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub condition: ErrorCondition,
    pub detail: String,
    /// The failure itself depended on Accept-Datetime.
    pub vary: bool,
}

impl Failure {
    fn new(condition: ErrorCondition, detail: impl Into<String>) -> Self {
        Failure { condition, detail: detail.into(), vary: false }
    }
}

impl MementoService {
    pub fn new(store: Store, config: ServerConfig) -> Self {
        Self::from_shared(Arc::new(store), Arc::new(config))
    }

    pub fn from_shared(store: Arc<Store>, config: Arc<ServerConfig>) -> Self {
        let uris = ServerUris::new(&config);
        MementoService { store, config, uris }
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn uris(&self) -> &ServerUris {
        &self.uris
    }

    pub fn handle(&self, method: &Method, uri: &Uri, headers: &HeaderMap) -> Response<Body> {
        let target = uri.path_and_query().map_or(uri.path(), |pq| pq.as_str());
        let mut resp = match route(method, target, headers, &self.config) {
            Ok(r) => self.dispatch(&r, headers),
            Err(RouteError::MethodNotAllowed) => {
                let mut r = with_body(StatusCode::METHOD_NOT_ALLOWED, TEXT_PLAIN, "405 Method Not Allowed\n");
                r.headers_mut().insert(ALLOW, HeaderValue::from_static("GET, HEAD"));
                r
            }
            Err(e @ (RouteError::BadRevision(_) | RouteError::BadPivot(_))) => self.error(ErrorCondition::BadRequest400, &e.to_string()),
            Err(e @ RouteError::UnknownRoute) => self.error(ErrorCondition::NotFound404, &e.to_string()),
        };
        if method == Method::HEAD {
            *resp.body_mut() = Body::default();
        }
        resp
    }

    pub fn dispatch(&self, route: &Route, headers: &HeaderMap) -> Response<Body> {
        let result = match route.kind {
            ResourceKind::OriginalDirect => self.serve_original(&route.title),
            ResourceKind::MementoDirect => self.serve_memento(&route.title, route.rev_id.unwrap_or(0)),
            ResourceKind::TimeGate302 => self.serve_timegate_302(&route.title, accept_datetime(headers)),
            ResourceKind::Negotiated200 => self.serve_negotiated_200(&route.title, accept_datetime(headers)),
            ResourceKind::SelfTimeGate302 => self.serve_timegate_pattern11(&route.title, accept_datetime(headers)),
            ResourceKind::TimeGateUsage => Ok(with_body(StatusCode::OK, TEXT_PLAIN, USAGE)),
            ResourceKind::TimeMapFull | ResourceKind::TimeMapPivotAscending | ResourceKind::TimeMapPivotDescending => {
                self.serve_timemap(route)
            }
        };
        result.unwrap_or_else(|f| {
            let mut resp = self.error(f.condition, &f.detail);
            if f.vary {
                resp.headers_mut().insert(VARY, HeaderValue::from_static("Accept-Datetime"));
            }
            resp
        })
    }

    pub fn render_error(&self, condition: ErrorCondition, detail: &str) -> Response<Body> {
        self.error(condition, detail)
    }

    fn error(&self, condition: ErrorCondition, detail: &str) -> Response<Body> {
        render_error(condition, self.config.error_page_type, detail)
    }

    fn history(&self, title: &str) -> Result<&PageHistory, Failure> {
        if self.config.excluded_namespaces.excludes(title) {
            return Err(Failure::new(
                ErrorCondition::Forbidden403,
                format!("datetime negotiation is not available for the namespace of {title:?}"),
            ));
        }
        self.store
            .get_history(title)
            .map_err(|_| Failure::new(ErrorCondition::NotFound404, format!("no page named {title:?}")))
    }

    fn self_negotiating(&self) -> bool {
        self.config.negotiation_pattern.self_negotiating()
    }

    /// Link entries for responses about a page: the original resource, its
    /// TimeGate and TimeMap, in the order each pattern uses.
    fn page_links(&self, history: &PageHistory, negotiated: bool) -> Vec<LinkEntry> {
        let title = history.title();
        let timemap = LinkEntry::new(self.uris.timemap(title), &["timemap"]).with_type(LINK_FORMAT);
        let mut links = if self.self_negotiating() {
            let original = LinkEntry::new(self.uris.original(title), &["original", "latest-version", "timegate"]);
            if negotiated {
                vec![timemap, original]
            } else {
                vec![original, timemap]
            }
        } else {
            let original = LinkEntry::new(self.uris.original(title), &["original", "latest-version"]);
            if negotiated {
                vec![timemap, original]
            } else {
                vec![original, LinkEntry::new(self.uris.timegate(title), &["timegate"]), timemap]
            }
        };
        if self.config.recommended_relations {
            links.extend(self.endpoint_links(history));
        }
        links
    }

    fn endpoint_links(&self, history: &PageHistory) -> Vec<LinkEntry> {
        let (first, last) = (history.first(), history.last());
        let entry = |r: &Revision, rels: &[&str]| {
            LinkEntry::new(self.uris.memento(history.title(), r.rev_id), rels).with_datetime(r.timestamp)
        };
        if first.rev_id == last.rev_id {
            vec![entry(first, &["first", "last", "memento"])]
        } else {
            vec![entry(first, &["first", "memento"]), entry(last, &["last", "memento"])]
        }
    }

    fn content_response(&self, rev: &Revision, links: &[LinkEntry]) -> Response<Body> {
        let mut resp = with_body(StatusCode::OK, &rev.content_type, rev.content.clone());
        resp.headers_mut().insert(LINK, header_value(&render_link_header(links)));
        resp
    }

    fn set_vary(&self, resp: &mut Response<Body>) {
        resp.headers_mut().insert(VARY, HeaderValue::from_static("Accept-Datetime"));
    }

    pub fn serve_original(&self, title: &str) -> Result<Response<Body>, Failure> {
        let history = self.history(title)?;
        let mut resp = self.content_response(history.last(), &self.page_links(history, false));
        if self.self_negotiating() {
            // The page URI is a TimeGate; its answer depends on the header.
            self.set_vary(&mut resp);
        }
        Ok(resp)
    }

    pub fn serve_memento(&self, title: &str, rev_id: u64) -> Result<Response<Body>, Failure> {
        let history = self.history(title)?;
        let rev = history
            .revision(rev_id)
            .ok_or_else(|| Failure::new(ErrorCondition::NotFound404, format!("{title:?} has no revision {rev_id}")))?;
        let mut resp = self.content_response(rev, &self.page_links(history, false));
        resp.headers_mut().insert(MEMENTO_DATETIME, header_value(&format_http_datetime(rev.timestamp)));
        Ok(resp)
    }

    /// Parses the target before any lookup so a bad header wins over 403/404.
    fn negotiate_for<'a>(
        &'a self,
        title: &str,
        accept_datetime: Option<&str>,
    ) -> Result<(&'a PageHistory, &'a Revision), Failure> {
        let target = match accept_datetime {
            Some(text) => parse_http_datetime(text).map_err(|e| Failure {
                vary: true,
                ..Failure::new(ErrorCondition::BadRequest400, format!("bad Accept-Datetime: {e}"))
            })?,
            None => TargetDatetime::now(),
        };
        let history = self.history(title)?;
        Ok((history, negotiate(history, &target).selected))
    }

    pub fn serve_timegate_302(&self, title: &str, accept_datetime: Option<&str>) -> Result<Response<Body>, Failure> {
        let (history, rev) = self.negotiate_for(title, accept_datetime)?;
        Ok(self.redirect(history, rev))
    }

    pub fn serve_timegate_pattern11(
        &self,
        title: &str,
        accept_datetime: Option<&str>,
    ) -> Result<Response<Body>, Failure> {
        if accept_datetime.is_none() {
            return self.serve_original(title);
        }
        self.serve_timegate_302(title, accept_datetime)
    }

    fn redirect(&self, history: &PageHistory, rev: &Revision) -> Response<Body> {
        let mut resp = Response::new(Body::default());
        *resp.status_mut() = StatusCode::FOUND;
        let h = resp.headers_mut();
        h.insert(VARY, HeaderValue::from_static("Accept-Datetime"));
        h.insert(LOCATION, header_value(&self.uris.memento(history.title(), rev.rev_id)));
        h.insert(LINK, header_value(&render_link_header(&self.page_links(history, true))));
        h.insert(CACHE_CONTROL, HeaderValue::from_static("no-store"));
        resp
    }

    pub fn serve_negotiated_200(
        &self,
        title: &str,
        accept_datetime: Option<&str>,
    ) -> Result<Response<Body>, Failure> {
        let (history, rev) = self.negotiate_for(title, accept_datetime)?;
        let mut resp = self.content_response(rev, &self.page_links(history, true));
        let h = resp.headers_mut();
        h.insert(MEMENTO_DATETIME, header_value(&format_http_datetime(rev.timestamp)));
        h.insert(CONTENT_LOCATION, header_value(&self.uris.memento(history.title(), rev.rev_id)));
        h.insert(VARY, HeaderValue::from_static("Accept-Datetime"));
        Ok(resp)
    }

    pub fn serve_timemap(&self, route: &Route) -> Result<Response<Body>, Failure> {
        let selection = route
            .timemap_selection()
            .ok_or_else(|| Failure::new(ErrorCondition::Internal500, "not a TimeMap route"))?;
        let history = self.history(&route.title)?;
        let page = build_page(
            history,
            selection,
            self.config.timemap_page_size,
            &self.uris,
            self.config.recommended_relations,
        )
        .ok_or_else(|| Failure::new(ErrorCondition::NotFound404, "no mementos on that side of the pivot"))?;
        Ok(with_body(StatusCode::OK, LINK_FORMAT, render_timemap(&page)))
    }

    pub fn pattern(&self) -> NegotiationPattern {
        self.config.negotiation_pattern
    }
}

fn accept_datetime(headers: &HeaderMap) -> Option<&str> {
    // A header that is not visible ASCII cannot be a valid date either.
    headers.get(ACCEPT_DATETIME).map(|v| v.to_str().unwrap_or("\u{fffd}"))
}

/// Accepts connections until `shutdown` resolves.
pub async fn serve_until(
    listener: TcpListener,
    service: Arc<MementoService>,
    shutdown: impl Future<Output = ()>,
) -> io::Result<()> {
    tokio::pin!(shutdown);
    loop {
        let (stream, _) = tokio::select! {
            accepted = listener.accept() => accepted?,
            _ = &mut shutdown => return Ok(()),
        };
        let service = Arc::clone(&service);
        tokio::spawn(async move {
            let svc = service_fn(move |req: Request<Incoming>| {
                let resp = service.handle(req.method(), req.uri(), req.headers());
                async move { Ok::<_, Infallible>(resp) }
            });
            // Client disconnects surface here; nothing to recover.
            let _ = http1::Builder::new()
                .title_case_headers(true)
                .serve_connection(TokioIo::new(stream), svc)
                .await;
        });
    }
}

/// Accepts connections forever.
pub async fn serve(listener: TcpListener, service: Arc<MementoService>) -> io::Result<()> {
    serve_until(listener, service, std::future::pending()).await
}
