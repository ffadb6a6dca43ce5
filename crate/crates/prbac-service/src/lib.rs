//! HTTP shell around the decision point: evaluation, role-membership
//! queries, optional actor activation, and policy administration.
//!
//! Every request evaluates against one immutable store snapshot
//! grabbed at request start; reloading swaps the snapshot atomically,
//! so in-flight evaluations finish against the old store and nothing
//! ever observes a mix. Decisions always travel in the XML body with
//! HTTP 200 — transport success is not Permit; HTTP error codes are
//! reserved for protocol and verification failures.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;

use prbac_core::actor::{self, ActorToken};
use prbac_core::loader::{load_policy_dir, LoadError};
use prbac_core::pdp::{decide, enabled_roles_query, PolicyStore};
use prbac_core::xml::{parse_request, serialize_response};

/// Environment variable the actor secret is read from by default.
pub const DEFAULT_SECRET_ENV: &str = "PRBAC_ACTOR_SECRET";
/// Environment variable overriding the configured listen address.
pub const LISTEN_ENV: &str = "PRBAC_LISTEN";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen_address: String,
    pub policy_dir: PathBuf,
    /// Name of the environment variable holding the actor secret;
    /// secrets never live in config files.
    pub actor_secret_source: String,
    pub actor_window_secs: u64,
    pub actor_mode: bool,
}

impl ServiceConfig {
    pub fn new(listen_address: impl Into<String>, policy_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen_address: listen_address.into(),
            policy_dir: policy_dir.into(),
            actor_secret_source: DEFAULT_SECRET_ENV.into(),
            actor_window_secs: 300,
            actor_mode: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("actor_window_secs must be positive")]
    ZeroWindow,
    #[error("actor mode is on but {0} resolves to no secret")]
    NoSecret(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One immutable generation of the policy store.
#[derive(Debug)]
pub struct Snapshot {
    pub id: u64,
    pub store: PolicyStore,
}

/// Shared service state: configuration, the resolved secret, and the
/// atomically swappable store snapshot.
#[derive(Debug)]
pub struct ServiceState {
    config: ServiceConfig,
    secret: Option<Vec<u8>>,
    snapshot: RwLock<Arc<Snapshot>>,
    next_snapshot_id: AtomicU64,
}

impl ServiceState {
    /// Builds state around an already-loaded store. `secret` must be
    /// present and non-empty when actor mode is on.
    pub fn new(
        config: ServiceConfig,
        store: PolicyStore,
        secret: Option<Vec<u8>>,
    ) -> Result<Arc<Self>, ServiceError> {
        if config.actor_window_secs == 0 {
            return Err(ServiceError::ZeroWindow);
        }
        if config.actor_mode && secret.as_deref().is_none_or(|s| s.is_empty()) {
            return Err(ServiceError::NoSecret(config.actor_secret_source.clone()));
        }
        Ok(Arc::new(ServiceState {
            config,
            secret,
            snapshot: RwLock::new(Arc::new(Snapshot { id: 1, store })),
            next_snapshot_id: AtomicU64::new(2),
        }))
    }

    /// Loads the policy directory and resolves the secret from the
    /// configured environment variable.
    pub fn from_config(config: ServiceConfig) -> Result<Arc<Self>, ServiceError> {
        let store = load_policy_dir(&config.policy_dir)?;
        let secret = std::env::var(&config.actor_secret_source)
            .ok()
            .map(String::into_bytes);
        Self::new(config, store, secret)
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    /// The snapshot requests should evaluate against; cheap Arc clone,
    /// no lock held afterwards.
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    /// Atomically replaces the serving snapshot; returns the id of the
    /// snapshot that was replaced.
    pub fn swap_store(&self, store: PolicyStore) -> u64 {
        let id = self.next_snapshot_id.fetch_add(1, Ordering::Relaxed);
        let fresh = Arc::new(Snapshot { id, store });
        let mut slot = self.snapshot.write().expect("snapshot lock");
        let previous = slot.id;
        *slot = fresh;
        previous
    }

    /// Re-reads the policy directory and swaps on success; a failed
    /// load leaves the serving snapshot untouched.
    pub fn reload(&self) -> Result<u64, LoadError> {
        let store = load_policy_dir(&self.config.policy_dir)?;
        Ok(self.swap_store(store))
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .expect("clock after epoch")
        .as_secs()
}

fn xml_response(status: StatusCode, body: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/xml")], body).into_response()
}

fn text_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "text/plain")], body).into_response()
}

async fn evaluate(State(state): State<Arc<ServiceState>>, body: Bytes) -> Response {
    let req = match parse_request(&body) {
        Ok(req) => req,
        Err(e) => return text_response(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let snapshot = state.snapshot();
    xml_response(
        StatusCode::OK,
        serialize_response(&decide(&snapshot.store, &req)),
    )
}

async fn roles(State(state): State<Arc<ServiceState>>, body: Bytes) -> Response {
    let req = match parse_request(&body) {
        Ok(req) => req,
        Err(e) => return text_response(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let snapshot = state.snapshot();
    let uris = enabled_roles_query(&snapshot.store, &req.subject);
    let mut body = uris.join("\n");
    if !body.is_empty() {
        body.push('\n');
    }
    text_response(StatusCode::OK, body)
}

async fn actor_activate(State(state): State<Arc<ServiceState>>, body: String) -> Response {
    let line = body.trim();
    let parts: Vec<&str> = line.split('|').collect();
    let [user, role_uri] = parts.as_slice() else {
        return text_response(StatusCode::BAD_REQUEST, "expected body user|role_uri".into());
    };
    let secret = state.secret.as_deref().expect("actor mode implies a secret");
    let snapshot = state.snapshot();
    match actor::activate(&snapshot.store, secret, user, role_uri, unix_now(), "") {
        Ok(token) => text_response(StatusCode::OK, token.to_line()),
        Err(actor::ActivationError::Denied) => {
            text_response(StatusCode::FORBIDDEN, "activation-denied".into())
        }
        Err(actor::ActivationError::Token(e)) => {
            text_response(StatusCode::BAD_REQUEST, e.code().into())
        }
    }
}

async fn actor_evaluate(State(state): State<Arc<ServiceState>>, body: String) -> Response {
    let Some((token_line, request_xml)) = body.split_once("\n\n") else {
        return text_response(
            StatusCode::BAD_REQUEST,
            "expected token line, blank line, request XML".into(),
        );
    };
    let token = match ActorToken::from_line(token_line.trim_end()) {
        Ok(token) => token,
        Err(e) => return text_response(StatusCode::UNAUTHORIZED, e.code().into()),
    };
    let secret = state.secret.as_deref().expect("actor mode implies a secret");
    if let Err(e) = actor::verify_token(secret, &token, unix_now(), state.config.actor_window_secs)
    {
        return text_response(StatusCode::UNAUTHORIZED, e.code().into());
    }
    let req = match parse_request(request_xml.as_bytes()) {
        Ok(req) => req,
        Err(e) => return text_response(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let snapshot = state.snapshot();
    xml_response(
        StatusCode::OK,
        serialize_response(&decide(&snapshot.store, &req)),
    )
}

async fn reload_policies(State(state): State<Arc<ServiceState>>) -> Response {
    match state.reload() {
        Ok(previous) => text_response(
            StatusCode::OK,
            format!("reloaded; replaced snapshot {previous}\n"),
        ),
        Err(e) => text_response(StatusCode::CONFLICT, e.to_string()),
    }
}

async fn health() -> Response {
    text_response(StatusCode::OK, "ok".into())
}

/// Builds the service router. Actor routes exist only in actor mode;
/// without it they fall through to 404.
pub fn router(state: Arc<ServiceState>) -> Router {
    let mut router = Router::new()
        .route("/v1/evaluate", post(evaluate))
        .route("/v1/roles", post(roles))
        .route("/v1/policies", put(reload_policies))
        .route("/v1/health", get(health));
    if state.config.actor_mode {
        router = router
            .route("/v1/actor/activate", post(actor_activate))
            .route("/v1/actor/evaluate", post(actor_evaluate));
    }
    router.with_state(state)
}

/// Loads config and policies, binds, and serves until the process
/// ends. `PRBAC_LISTEN` overrides the configured address; `on_ready`
/// observes the bound socket (useful with port 0).
pub fn run_blocking(
    config: ServiceConfig,
    on_ready: impl FnOnce(SocketAddr),
) -> Result<(), ServiceError> {
    let mut config = config;
    if let Ok(listen) = std::env::var(LISTEN_ENV) {
        config.listen_address = listen;
    }
    let state = ServiceState::from_config(config)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let addr = state.config.listen_address.clone();
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|source| ServiceError::Bind { addr, source })?;
        on_ready(listener.local_addr()?);
        axum::serve(listener, router(state))
            .await
            .map_err(ServiceError::from)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use prbac_core::compiler::compile_model;
    use prbac_core::sample::student_model;

    fn config() -> ServiceConfig {
        ServiceConfig::new("127.0.0.1:0", "/nonexistent")
    }

    #[test]
    fn swap_returns_previous_snapshot_id() {
        let state = ServiceState::new(config(), PolicyStore::empty(), None).unwrap();
        assert_eq!(state.snapshot().id, 1);
        let store = compile_model(&student_model()).unwrap();
        assert_eq!(state.swap_store(store), 1);
        assert_eq!(state.snapshot().id, 2);
        assert_eq!(state.swap_store(PolicyStore::empty()), 2);
        assert_eq!(state.snapshot().id, 3);
    }

    #[test]
    fn actor_mode_requires_a_secret() {
        let mut cfg = config();
        cfg.actor_mode = true;
        assert!(matches!(
            ServiceState::new(cfg.clone(), PolicyStore::empty(), None),
            Err(ServiceError::NoSecret(_))
        ));
        assert!(matches!(
            ServiceState::new(cfg.clone(), PolicyStore::empty(), Some(Vec::new())),
            Err(ServiceError::NoSecret(_))
        ));
        assert!(ServiceState::new(cfg, PolicyStore::empty(), Some(b"s".to_vec())).is_ok());
    }

    #[test]
    fn zero_window_is_rejected() {
        let mut cfg = config();
        cfg.actor_window_secs = 0;
        assert!(matches!(
            ServiceState::new(cfg, PolicyStore::empty(), None),
            Err(ServiceError::ZeroWindow)
        ));
    }
}
