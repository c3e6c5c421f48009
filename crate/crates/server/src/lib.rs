//! Read-only HTTP/JSON service over a finished artifact directory.
//!
//! | route                      | body                                |
//! |----------------------------|-------------------------------------|
//! | `GET /movies`              | movie records                       |
//! | `GET /movies/{id}`         | record and the modalities with data |
//! | `GET /movies/{id}/topics`  | topic proportions                   |
//! | `GET /movies/{id}/similar` | fused ranking (`weights`, `n`)      |
//! | `GET /topics`              | top words of every topic (`n`)      |
//! | `GET /topics/{id}/words`   | top words of one topic (`n`)        |
//! | `GET /topics/{id}/movies`  | movies by topic proportion          |
//! | `GET /eval/report`         | evaluation tables                   |
//! | `GET /modalities`          | modality names and availability     |
//!
//! Errors are `{"error": {"code", "message"}}` with status 400 or 404.

mod error;
mod routes;
mod state;

use std::net::SocketAddr;
use std::sync::Arc;

use tokio::net::TcpListener;

pub use error::{ApiFailure, ServerError};
pub use routes::router;
pub use state::{Catalog, DEFAULT_SIMILAR, DEFAULT_TOPIC_WORDS, DEFAULT_WORDS};

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServerError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServerError::Bind { addr, source })
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    catalog: Arc<Catalog>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), ServerError> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, router(catalog))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServerError::Serve)
}
