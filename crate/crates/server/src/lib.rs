//! HTTP time-travel service over a [`memento_core::Store`].

pub mod config;
pub mod respond;
pub mod route;
pub mod service;
pub mod uris;

pub use config::{ConfigError, ErrorPageType, NamespacePolicy, NegotiationPattern, ServerConfig};
pub use respond::{render_error, ErrorCondition};
pub use route::{route, ResourceKind, Route, RouteError};
pub use service::{serve, serve_until, Failure, MementoService};
pub use uris::ServerUris;
