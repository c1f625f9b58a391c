//! Response assembly and error pages.

use hyper::body::Bytes;
use hyper::header::{HeaderName, HeaderValue, CONTENT_TYPE};
use hyper::{Response, StatusCode};
use http_body_util::Full;

use crate::config::ErrorPageType;

pub type Body = Full<Bytes>;

pub const MEMENTO_DATETIME: HeaderName = HeaderName::from_static("memento-datetime");
pub const X_MEMENTO_ERROR: HeaderName = HeaderName::from_static("x-memento-error");
pub const TEXT_PLAIN: &str = "text/plain; charset=utf-8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCondition {
    BadRequest400,
    Forbidden403,
    NotFound404,
    Internal500,
}

impl ErrorCondition {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCondition::BadRequest400 => StatusCode::BAD_REQUEST,
            ErrorCondition::Forbidden403 => StatusCode::FORBIDDEN,
            ErrorCondition::NotFound404 => StatusCode::NOT_FOUND,
            ErrorCondition::Internal500 => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(self) -> u16 {
        self.status().as_u16()
    }
}

pub fn header_value(text: &str) -> HeaderValue {
    // Every value we emit is built from URIs, dates and fixed tokens.
    HeaderValue::from_str(text).unwrap_or_else(|_| HeaderValue::from_static("invalid"))
}

pub fn with_body(status: StatusCode, content_type: &str, body: impl Into<Bytes>) -> Response<Body> {
    let mut resp = Response::new(Full::new(body.into()));
    *resp.status_mut() = status;
    resp.headers_mut().insert(CONTENT_TYPE, header_value(content_type));
    resp
}

/// Traditional mode answers with the real status. Friendly mode answers 200
/// and carries the code in an `X-Memento-Error` header and body line.
pub fn render_error(condition: ErrorCondition, mode: ErrorPageType, detail: &str) -> Response<Body> {
    let status = condition.status();
    let reason = status.canonical_reason().unwrap_or("Error");
    match mode {
        ErrorPageType::Traditional => {
            with_body(status, TEXT_PLAIN, format!("{} {reason}: {detail}\n", status.as_u16()))
        }
        ErrorPageType::Friendly => {
            let body = format!("{reason}: {detail}\nX-Memento-Error: {}\n", status.as_u16());
            let mut resp = with_body(StatusCode::OK, TEXT_PLAIN, body);
            resp.headers_mut().insert(X_MEMENTO_ERROR, HeaderValue::from(status.as_u16()));
            resp
        }
    }
}
