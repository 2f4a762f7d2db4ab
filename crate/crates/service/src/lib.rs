//! HTTP/JSON service around curation sessions.
//!
//! Each session sits behind its own mutex, so mutations on one session are
//! totally ordered while different sessions proceed independently. Reads
//! clone the session under the lock and render outside it.

pub mod api;
pub mod error;
pub mod export;
pub mod store;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::DefaultBodyLimit;
use axum::routing::{delete, get, post};
use axum::Router;
use glyphlab_core::session::{Operation, Session};
use tokio::net::TcpListener;
use tokio::sync::{Mutex, RwLock};

use crate::api::SessionView;
pub use crate::error::ApiError;
use crate::store::Store;

const BODY_LIMIT: usize = 32 * 1024 * 1024;

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    store: Option<Store>,
}

impl AppState {
    pub fn in_memory() -> Arc<AppState> {
        Arc::new(AppState::default())
    }

    /// Persists to `dir`, first restoring every session already stored there.
    pub async fn persistent(dir: impl Into<PathBuf>) -> std::io::Result<Arc<AppState>> {
        let store = Store::open(dir).await?;
        let mut sessions = HashMap::new();
        for s in store.load_all().await? {
            sessions.insert(s.id().to_owned(), Arc::new(Mutex::new(s)));
        }
        tracing::info!(count = sessions.len(), "restored sessions");
        Ok(Arc::new(AppState { sessions: RwLock::new(sessions), store: Some(store) }))
    }

    pub fn store(&self) -> Option<&Store> {
        self.store.as_ref()
    }

    async fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::session_not_found(id))
    }

    async fn insert(&self, session: Session) -> Result<(), ApiError> {
        if let Some(store) = &self.store {
            store.create(&session).await.map_err(ApiError::storage)?;
        }
        let id = session.id().to_owned();
        self.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
        Ok(())
    }

    /// A consistent copy of the session for read-only work.
    pub async fn snapshot(&self, id: &str) -> Result<Session, ApiError> {
        let handle = self.handle(id).await?;
        let s = handle.lock().await;
        Ok(s.clone())
    }

    /// Applies one operation under the session lock and persists it; a
    /// storage failure rolls the in-memory session back.
    async fn mutate(&self, id: &str, op: Operation) -> Result<SessionView, ApiError> {
        let handle = self.handle(id).await?;
        let mut s = handle.lock().await;
        let before = s.clone();
        s.apply(op.clone())?;
        if let Some(store) = &self.store {
            if let Err(e) = store.record(&s, &op).await {
                *s = before;
                return Err(ApiError::storage(e));
            }
        }
        Ok(SessionView::of(&s))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/designs:append", post(api::append))
        .route("/sessions/{id}/designs/{design_id}", delete(api::cull))
        .route("/sessions/{id}/designs/{design_id}/override", post(api::override_design))
        .route("/sessions/{id}/mode", post(api::set_mode))
        .route("/sessions/{id}/page", post(api::page))
        .route("/sessions/{id}/select", post(api::select))
        .route("/sessions/{id}/glyphs/{key}/move", post(api::move_glyph))
        .route("/sessions/{id}/glyphs/{key}/resize", post(api::resize_glyph))
        .route("/sessions/{id}/sheet.svg", get(api::sheet))
        .route("/sessions/{id}/legend", get(api::legend_for))
        .route("/sessions/{id}/export.zip", get(api::export))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Serves the API on `listener` until the process stops.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}
