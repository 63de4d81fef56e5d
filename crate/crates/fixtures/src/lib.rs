//! A local, deterministic web server for exercising the crawler offline.
//!
//! Two origins are served. The *primary* origin hosts the scenario pages and
//! answers for any host name, so a browser whose resolver maps `*.test` to
//! loopback can reach `static.test`, `cookie-gated.test` and so on as if they
//! were separate sites. The *secondary* origin is meant to be reached as
//! `localhost` and plays the third party: the cookie probe frame, off-domain
//! link targets and cross-origin assets.
//!
//! Every page is a pure function of its path, query and (for the rotating
//! scenario) a per-request counter.

mod assets;
mod pages;

use std::net::{Ipv4Addr, SocketAddr};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::header::{CACHE_CONTROL, CONTENT_TYPE, COOKIE, HOST, SET_COOKIE};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Static,
    RotatingBanner,
    CookieGated,
    CrossDomainLink,
    DeepChain,
    SlowLoad,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Static,
        Scenario::RotatingBanner,
        Scenario::CookieGated,
        Scenario::CrossDomainLink,
        Scenario::DeepChain,
        Scenario::SlowLoad,
    ];

    /// URL path segment, also the first label of the scenario's virtual host.
    pub fn slug(self) -> &'static str {
        match self {
            Scenario::Static => "static",
            Scenario::RotatingBanner => "rotating",
            Scenario::CookieGated => "cookie-gated",
            Scenario::CrossDomainLink => "cross-domain",
            Scenario::DeepChain => "chain",
            Scenario::SlowLoad => "slow",
        }
    }

    pub fn from_slug(slug: &str) -> Option<Self> {
        Scenario::ALL.into_iter().find(|s| s.slug() == slug)
    }

    /// Landing path on the primary origin.
    pub fn landing_path(self) -> &'static str {
        match self {
            Scenario::Static => "/static/",
            Scenario::RotatingBanner => "/rotating/",
            Scenario::CookieGated => "/cookie-gated/",
            Scenario::CrossDomainLink => "/cross-domain/",
            Scenario::DeepChain => "/chain/0",
            Scenario::SlowLoad => "/slow",
        }
    }
}

/// Tunable scenario geometry. Each field can be overridden per request by a
/// query parameter of the same name; the effective values are echoed into the
/// page as JSON in `<script id="scenario-params">`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Fraction of the viewport's 40 px chunk grid the cookie banner covers.
    pub banner_fraction: f64,
    /// Viewport height the banner geometry is computed for.
    pub viewport_height: u32,
    /// Number of pages in the deep chain after the first.
    pub chain_depth: u32,
    /// Distinct variants of the rotating banner before one repeats.
    pub rotation_period: u64,
    /// Response delay of the slow-load page.
    pub slow_delay_ms: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            banner_fraction: 0.3,
            viewport_height: 768,
            chain_depth: 8,
            rotation_period: 1_000_003,
            slow_delay_ms: 120_000,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
struct ParamOverrides {
    banner_fraction: Option<f64>,
    viewport_height: Option<u32>,
    chain_depth: Option<u32>,
    rotation_period: Option<u64>,
    slow_delay_ms: Option<u64>,
}

impl ScenarioParams {
    fn with(&self, o: &ParamOverrides) -> Self {
        ScenarioParams {
            banner_fraction: o.banner_fraction.unwrap_or(self.banner_fraction).clamp(0.0, 1.0),
            viewport_height: o.viewport_height.unwrap_or(self.viewport_height).max(1),
            chain_depth: o.chain_depth.unwrap_or(self.chain_depth),
            rotation_period: o.rotation_period.unwrap_or(self.rotation_period).max(1),
            slow_delay_ms: o.slow_delay_ms.unwrap_or(self.slow_delay_ms),
        }
    }

    /// Height in pixels of the cookie banner: a whole number of chunk rows.
    pub fn banner_height(&self) -> u32 {
        let rows = self.viewport_height.div_ceil(40);
        (self.banner_fraction * f64::from(rows)).round() as u32 * 40
    }
}

#[derive(Clone, Debug, Default)]
pub struct FixtureConfig {
    /// 0 picks a free port.
    pub primary_port: u16,
    pub secondary_port: u16,
    pub params: ScenarioParams,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) struct Shared {
    pub params: ScenarioParams,
    pub secondary_origin: String,
    pub rotation: AtomicU64,
}

impl Shared {
    /// Returns this request's rotation value and advances the counter.
    fn next_rotation(&self) -> u64 {
        self.rotation.fetch_add(1, Ordering::SeqCst)
    }
}

/// A running fixture server. Dropping it stops both origins.
pub struct FixtureServer {
    primary: SocketAddr,
    secondary: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
    shared: Arc<Shared>,
}

impl FixtureServer {
    pub fn primary_port(&self) -> u16 {
        self.primary.port()
    }

    pub fn secondary_port(&self) -> u16 {
        self.secondary.port()
    }

    /// `http://127.0.0.1:<port><path>` on the primary origin.
    pub fn url(&self, path: &str) -> String {
        format!("http://127.0.0.1:{}{}", self.primary.port(), path)
    }

    /// `http://<host>:<port><path>` on the primary origin, for hosts the
    /// browser resolves to loopback.
    pub fn host_url(&self, host: &str, path: &str) -> String {
        format!("http://{host}:{}{path}", self.primary.port())
    }

    /// Third-party origin, `http://localhost:<port>`.
    pub fn secondary_origin(&self) -> &str {
        &self.shared.secondary_origin
    }

    pub fn rotation_counter(&self) -> u64 {
        self.shared.rotation.load(Ordering::SeqCst)
    }

    pub async fn shutdown(mut self) {
        self.stop();
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.stop();
    }
}

async fn bind(port: u16) -> Result<TcpListener, FixtureError> {
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    TcpListener::bind(addr)
        .await
        .map_err(|source| FixtureError::Bind { addr, source })
}

/// Binds both origins and serves them on the current tokio runtime.
pub async fn serve(config: FixtureConfig) -> Result<FixtureServer, FixtureError> {
    let primary_listener = bind(config.primary_port).await?;
    let secondary_listener = bind(config.secondary_port).await?;
    let primary = primary_listener.local_addr().expect("bound socket");
    let secondary = secondary_listener.local_addr().expect("bound socket");
    let shared = Arc::new(Shared {
        params: config.params,
        secondary_origin: format!("http://localhost:{}", secondary.port()),
        rotation: AtomicU64::new(0),
    });

    let (tx, rx) = oneshot::channel::<()>();
    let (primary_app, secondary_app) = (primary_router(shared.clone()), secondary_router(shared.clone()));
    let task = tokio::spawn(async move {
        let (stop_a, stop_b) = {
            let (a_tx, a_rx) = oneshot::channel::<()>();
            let (b_tx, b_rx) = oneshot::channel::<()>();
            tokio::spawn(async move {
                let _ = rx.await;
                let _ = a_tx.send(());
                let _ = b_tx.send(());
            });
            (a_rx, b_rx)
        };
        let a = axum::serve(primary_listener, primary_app).with_graceful_shutdown(async move {
            let _ = stop_a.await;
        });
        let b = axum::serve(secondary_listener, secondary_app).with_graceful_shutdown(async move {
            let _ = stop_b.await;
        });
        let _ = tokio::join!(a, b);
    });
    tracing::info!(%primary, %secondary, "fixture server listening");
    Ok(FixtureServer {
        primary,
        secondary,
        shutdown: Some(tx),
        task: Some(task),
        shared,
    })
}

type AppState = Arc<Shared>;

fn primary_router(shared: AppState) -> Router {
    Router::new()
        .route("/", get(root))
        .route("/static/", get(static_landing))
        .route("/static/p/{n}", get(static_page))
        .route("/rotating/", get(rotating_landing))
        .route("/rotating/p/{n}", get(rotating_page))
        .route("/cookie-gated/", get(gated_landing))
        .route("/cookie-gated/p/{n}", get(gated_page))
        .route("/cross-domain/", get(cross_domain))
        .route("/chain/{n}", get(chain))
        .route("/slow", get(slow))
        .route("/cookies/set", get(cookie_set))
        .route("/cookies/echo", get(cookie_echo))
        .route("/clickables", get(|| async { html(pages::clickables()) }))
        .route("/images", get(images_page))
        .route("/tall", get(|| async { html(pages::tall()) }))
        .route("/blank", get(|| async { html(pages::blank()) }))
        .route("/assets/img/{name}", get(asset_image))
        .route("/assets/app.js", get(asset_script))
        .with_state(shared)
}

fn secondary_router(shared: AppState) -> Router {
    Router::new()
        .route("/tp/frame", get(|| async { html(pages::third_party_frame()) }))
        .route("/elsewhere", get(|| async { html(pages::elsewhere()) }))
        .route("/assets/img/{name}", get(asset_image))
        .with_state(shared)
}

fn html(body: String) -> Response {
    let mut res = Html(body).into_response();
    res.headers_mut()
        .insert(CACHE_CONTROL, HeaderValue::from_static("no-store"));
    res
}

fn render(scenario: Scenario, page: u32, state: &Shared, q: &ParamOverrides, query: &str) -> Response {
    let params = state.params.with(q);
    let ctx = pages::PageContext {
        params: &params,
        query,
        secondary_origin: &state.secondary_origin,
    };
    html(match scenario {
        Scenario::Static => pages::static_page(&ctx, page),
        Scenario::RotatingBanner => {
            let turn = state.next_rotation() % params.rotation_period;
            pages::rotating_page(&ctx, page, turn)
        }
        Scenario::CookieGated => pages::gated_page(&ctx, page),
        Scenario::CrossDomainLink => pages::cross_domain(&ctx),
        Scenario::DeepChain => pages::chain(&ctx, page),
        Scenario::SlowLoad => pages::slow(&ctx),
    })
}

fn query_string(uri: &axum::http::Uri) -> String {
    uri.query().map(|q| format!("?{q}")).unwrap_or_default()
}

/// Host-based dispatch: `<slug>.test` (with or without `www.`) serves that
/// scenario's landing page at `/`. The `wwwonly` host serves a page without
/// clickables unless reached through `www.`.
async fn root(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<ParamOverrides>,
    uri: axum::http::Uri,
) -> Response {
    let host = headers
        .get(HOST)
        .and_then(|h| h.to_str().ok())
        .unwrap_or_default();
    let host = host.rsplit_once(':').map_or(host, |(h, _)| h);
    let (www, bare) = match host.strip_prefix("www.") {
        Some(rest) => (true, rest),
        None => (false, host),
    };
    let slug = bare.split('.').next().unwrap_or_default();
    if slug == "wwwonly" {
        return if www {
            render(Scenario::Static, 0, &state, &q, &query_string(&uri))
        } else {
            html(pages::blank())
        };
    }
    match Scenario::from_slug(slug) {
        Some(scenario) => {
            if scenario == Scenario::SlowLoad {
                return slow(State(state), Query(q), uri).await;
            }
            render(scenario, 0, &state, &q, &query_string(&uri))
        }
        None => html(pages::index()),
    }
}

macro_rules! scenario_handlers {
    ($landing:ident, $page:ident, $scenario:expr) => {
        async fn $landing(State(state): State<AppState>, Query(q): Query<ParamOverrides>, uri: axum::http::Uri) -> Response {
            render($scenario, 0, &state, &q, &query_string(&uri))
        }

        async fn $page(
            State(state): State<AppState>,
            Path(n): Path<u32>,
            Query(q): Query<ParamOverrides>,
            uri: axum::http::Uri,
        ) -> Response {
            render($scenario, n, &state, &q, &query_string(&uri))
        }
    };
}

scenario_handlers!(static_landing, static_page, Scenario::Static);
scenario_handlers!(rotating_landing, rotating_page, Scenario::RotatingBanner);
scenario_handlers!(gated_landing, gated_page, Scenario::CookieGated);

async fn cross_domain(State(state): State<AppState>, Query(q): Query<ParamOverrides>, uri: axum::http::Uri) -> Response {
    render(Scenario::CrossDomainLink, 0, &state, &q, &query_string(&uri))
}

async fn chain(
    State(state): State<AppState>,
    Path(n): Path<u32>,
    Query(q): Query<ParamOverrides>,
    uri: axum::http::Uri,
) -> Response {
    render(Scenario::DeepChain, n, &state, &q, &query_string(&uri))
}

async fn slow(State(state): State<AppState>, Query(q): Query<ParamOverrides>, uri: axum::http::Uri) -> Response {
    let delay = state.params.with(&q).slow_delay_ms;
    tokio::time::sleep(Duration::from_millis(delay)).await;
    render(Scenario::SlowLoad, 0, &state, &q, &query_string(&uri))
}

#[derive(Deserialize)]
struct CookieSet {
    name: String,
    value: String,
}

async fn cookie_set(Query(c): Query<CookieSet>) -> Response {
    let mut res = html(pages::cookie_set(&c.name, &c.value));
    let cookie = format!("{}={}; Path=/; SameSite=Lax; Max-Age=86400", c.name, c.value);
    match HeaderValue::from_str(&cookie) {
        Ok(v) => {
            res.headers_mut().insert(SET_COOKIE, v);
            res
        }
        Err(_) => (StatusCode::BAD_REQUEST, "invalid cookie").into_response(),
    }
}

async fn cookie_echo(headers: HeaderMap) -> Response {
    let sent = headers
        .get(COOKIE)
        .and_then(|h| h.to_str().ok())
        .unwrap_or_default();
    html(pages::cookie_echo(sent))
}

async fn images_page(State(state): State<AppState>) -> Response {
    html(pages::images(&state.secondary_origin))
}

async fn asset_image(Path(name): Path<String>) -> Response {
    let stem = name.strip_suffix(".png").unwrap_or(&name);
    let mut res = assets::tile_png(stem).into_response();
    res.headers_mut()
        .insert(CONTENT_TYPE, HeaderValue::from_static("image/png"));
    res.headers_mut()
        .insert(CACHE_CONTROL, HeaderValue::from_static("max-age=3600"));
    res
}

async fn asset_script() -> Response {
    let mut res = "window.__appLoaded = true;\n".into_response();
    res.headers_mut()
        .insert(CONTENT_TYPE, HeaderValue::from_static("text/javascript"));
    res
}
