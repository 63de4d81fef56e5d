//! A small client for the W3C WebDriver protocol, covering exactly what the
//! crawler needs: sessions, navigation, script evaluation, screenshots,
//! element clicks and window handling.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use base64::Engine as _;
use cookiediff_core::model::CookiePolicy;
use cookiediff_core::Raster;
use reqwest::{Method, StatusCode};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

const ELEMENT_KEY: &str = "element-6066-11e4-a52e-4f735466cecf";

#[derive(Debug, thiserror::Error)]
pub enum WebDriverError {
    #[error("webdriver endpoint {endpoint} unreachable: {source}")]
    DriverUnreachable {
        endpoint: String,
        #[source]
        source: reqwest::Error,
    },
    #[error("session not created: {0}")]
    SessionNotCreated(String),
    #[error("browser session is gone: {0}")]
    SessionDead(String),
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("script error: {0}")]
    Script(String),
    #[error("element not interactable: {0}")]
    Interaction(String),
    #[error("no such element: {0}")]
    NoSuchElement(String),
    #[error("navigation failed: {0}")]
    Navigation(String),
    #[error("webdriver error `{code}`: {message}")]
    Protocol { code: String, message: String },
    #[error("unexpected response: {0}")]
    Decode(String),
    #[error("viewport has zero area")]
    EmptyViewport,
}

impl WebDriverError {
    /// True when the session can no longer be driven and must be replaced.
    pub fn is_session_dead(&self) -> bool {
        matches!(
            self,
            WebDriverError::SessionDead(_) | WebDriverError::DriverUnreachable { .. }
        )
    }

    fn from_wire(code: &str, message: String) -> Self {
        match code {
            "invalid session id" => WebDriverError::SessionDead(message),
            "session not created" => WebDriverError::SessionNotCreated(message),
            "timeout" | "script timeout" => WebDriverError::Timeout(message),
            "javascript error" => WebDriverError::Script(message),
            "element not interactable" | "element click intercepted" | "stale element reference" => {
                WebDriverError::Interaction(message)
            }
            "no such element" => WebDriverError::NoSuchElement(message),
            "no such window" => WebDriverError::Navigation(message),
            _ if message.contains("net::ERR_") => WebDriverError::Navigation(message),
            _ if message.contains("disconnected") || message.contains("chrome not reachable") => {
                WebDriverError::SessionDead(message)
            }
            _ => WebDriverError::Protocol {
                code: code.to_string(),
                message,
            },
        }
    }
}

pub type Result<T, E = WebDriverError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Viewport {
    pub width: u32,
    pub height: u32,
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport {
            width: 1366,
            height: 768,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BrowserKind {
    #[default]
    Chrome,
    Firefox,
}

#[derive(Clone, Debug, Serialize)]
pub struct BrowserConfig {
    pub endpoint: String,
    pub kind: BrowserKind,
    /// Browser executable; the driver's default is used when unset.
    pub binary: Option<PathBuf>,
    pub viewport: Viewport,
    pub page_timeout: Duration,
    pub script_timeout: Duration,
    /// Appended to the browser command line.
    pub extra_args: Vec<String>,
}

impl Default for BrowserConfig {
    fn default() -> Self {
        BrowserConfig {
            endpoint: "http://127.0.0.1:9515".into(),
            kind: BrowserKind::Chrome,
            binary: None,
            viewport: Viewport::default(),
            page_timeout: Duration::from_secs(30),
            script_timeout: Duration::from_secs(30),
            extra_args: Vec::new(),
        }
    }
}

impl BrowserConfig {
    pub fn capabilities(&self, policy: CookiePolicy) -> Value {
        let Viewport { width, height } = self.viewport;
        let block = policy == CookiePolicy::BlockThirdParty;
        match self.kind {
            BrowserKind::Chrome => {
                let mut args = vec![
                    "--headless".to_string(),
                    "--no-sandbox".into(),
                    "--disable-dev-shm-usage".into(),
                    "--hide-scrollbars".into(),
                    "--force-device-scale-factor=1".into(),
                    format!("--window-size={width},{height}"),
                    "--disable-features=HttpsUpgrades,HttpsFirstBalancedModeAutoEnable".into(),
                    "--no-first-run".into(),
                    "--disable-background-networking".into(),
                ];
                if block {
                    args.push("--test-third-party-cookie-phaseout".into());
                }
                args.extend(self.extra_args.iter().cloned());
                let mut options = json!({
                    "args": args,
                    "prefs": {
                        "profile.block_third_party_cookies": block,
                        "profile.cookie_controls_mode": if block { 1 } else { 0 },
                    },
                });
                if let Some(binary) = &self.binary {
                    options["binary"] = json!(binary);
                }
                json!({ "browserName": "chrome", "goog:chromeOptions": options })
            }
            BrowserKind::Firefox => {
                let mut args = vec![
                    "-headless".to_string(),
                    format!("--width={width}"),
                    format!("--height={height}"),
                ];
                args.extend(self.extra_args.iter().cloned());
                let mut options = json!({
                    "args": args,
                    "prefs": {
                        "network.cookie.cookieBehavior": if block { 1 } else { 0 },
                        "layout.css.devPixelsPerPx": "1.0",
                        "dom.security.https_first": false,
                    },
                });
                if let Some(binary) = &self.binary {
                    options["binary"] = json!(binary);
                }
                json!({ "browserName": "firefox", "moz:firefoxOptions": options })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadOutcome {
    Complete,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementRef(String);

static PROFILE_COUNTER: AtomicU64 = AtomicU64::new(0);

fn unique_profile_tag(label: &str) -> String {
    let n = PROFILE_COUNTER.fetch_add(1, Ordering::Relaxed);
    format!("{label}-{}-{n}", std::process::id())
}

/// One live browser with its own profile.
///
/// Commands are serialized through an internal lock, so a session may be
/// shared by reference but is only ever driven by one command at a time.
#[derive(Debug)]
pub struct BrowserSession {
    http: reqwest::Client,
    base: String,
    id: String,
    policy: CookiePolicy,
    viewport: Viewport,
    profile_tag: String,
    page_timeout: Duration,
    lock: Mutex<()>,
    closed: AtomicBool,
}

#[derive(Deserialize)]
struct WireError {
    error: String,
    #[serde(default)]
    message: String,
}

fn http_client(timeout: Duration) -> reqwest::Client {
    reqwest::Client::builder()
        .timeout(timeout)
        .build()
        .expect("http client configuration is static")
}

fn decode_response(status: StatusCode, body: &[u8]) -> Result<Value> {
    let parsed: Value = serde_json::from_slice(body).map_err(|e| {
        WebDriverError::Decode(format!(
            "status {status}: {e}: {}",
            String::from_utf8_lossy(&body[..body.len().min(200)])
        ))
    })?;
    let value = parsed.get("value").cloned().unwrap_or(Value::Null);
    if status.is_success() {
        return Ok(value);
    }
    match serde_json::from_value::<WireError>(value) {
        Ok(err) => Err(WebDriverError::from_wire(&err.error, err.message)),
        Err(_) => Err(WebDriverError::Protocol {
            code: status.to_string(),
            message: String::from_utf8_lossy(body).into_owned(),
        }),
    }
}

/// Opens a session with a fresh profile configured for `policy`.
pub async fn open_session(
    config: &BrowserConfig,
    policy: CookiePolicy,
    label: &str,
) -> Result<BrowserSession> {
    let endpoint = config.endpoint.trim_end_matches('/').to_string();
    let http = http_client(config.page_timeout.max(config.script_timeout) + Duration::from_secs(60));
    let body = json!({ "capabilities": { "alwaysMatch": config.capabilities(policy) } });
    let res = http
        .post(format!("{endpoint}/session"))
        .json(&body)
        .send()
        .await
        .map_err(|source| WebDriverError::DriverUnreachable {
            endpoint: endpoint.clone(),
            source,
        })?;
    let status = res.status();
    let bytes = res.bytes().await.map_err(|source| WebDriverError::DriverUnreachable {
        endpoint: endpoint.clone(),
        source,
    })?;
    let value = match decode_response(status, &bytes) {
        Err(WebDriverError::Protocol { message, .. }) => {
            return Err(WebDriverError::SessionNotCreated(message))
        }
        other => other?,
    };
    let id = value["sessionId"]
        .as_str()
        .ok_or_else(|| WebDriverError::Decode("new session response lacks sessionId".into()))?
        .to_string();

    let session = BrowserSession {
        http,
        base: format!("{endpoint}/session/{id}"),
        id,
        policy,
        viewport: config.viewport,
        profile_tag: unique_profile_tag(label),
        page_timeout: config.page_timeout,
        lock: Mutex::new(()),
        closed: AtomicBool::new(false),
    };
    let setup = async {
        session
            .command(
                Method::POST,
                "/timeouts",
                Some(json!({
                    "pageLoad": config.page_timeout.as_millis() as u64,
                    "script": config.script_timeout.as_millis() as u64,
                    "implicit": 0,
                })),
            )
            .await?;
        session.ensure_viewport().await
    };
    if let Err(e) = setup.await {
        session.close().await;
        return Err(e);
    }
    tracing::debug!(session = %session.id, tag = %session.profile_tag, ?policy, "session opened");
    Ok(session)
}

impl BrowserSession {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn policy(&self) -> CookiePolicy {
        self.policy
    }

    pub fn viewport(&self) -> Viewport {
        self.viewport
    }

    pub fn profile_tag(&self) -> &str {
        &self.profile_tag
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::SeqCst)
    }

    async fn command(&self, method: Method, path: &str, body: Option<Value>) -> Result<Value> {
        if self.is_closed() {
            return Err(WebDriverError::SessionDead("session was closed".into()));
        }
        let _guard = self.lock.lock().await;
        self.send(method, path, body).await
    }

    async fn send(&self, method: Method, path: &str, body: Option<Value>) -> Result<Value> {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(body) = body {
            req = req.json(&body);
        }
        let res = req.send().await.map_err(|e| {
            if e.is_timeout() {
                WebDriverError::Timeout(e.to_string())
            } else {
                WebDriverError::SessionDead(e.to_string())
            }
        })?;
        let status = res.status();
        let bytes = res
            .bytes()
            .await
            .map_err(|e| WebDriverError::SessionDead(e.to_string()))?;
        if self.is_closed() {
            return Err(WebDriverError::SessionDead("session was closed".into()));
        }
        decode_response(status, &bytes)
    }

    /// Navigates and waits for the load event. A page that does not finish
    /// within the page-load budget yields [`LoadOutcome::Timeout`].
    pub async fn navigate(&self, url: &str) -> Result<LoadOutcome> {
        match self
            .command(Method::POST, "/url", Some(json!({ "url": url })))
            .await
        {
            Ok(_) => {}
            Err(WebDriverError::Timeout(_)) => return Ok(LoadOutcome::Timeout),
            Err(e) => return Err(e),
        }
        let current = self.current_url().await?;
        if is_error_page(&current) {
            return Err(WebDriverError::Navigation(format!("{url} landed on {current}")));
        }
        Ok(LoadOutcome::Complete)
    }

    pub async fn current_url(&self) -> Result<String> {
        let v = self.command(Method::GET, "/url", None).await?;
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| WebDriverError::Decode(format!("url is not a string: {v}")))
    }

    /// Runs `script` as a function body with `args` bound to `arguments`.
    pub async fn evaluate(&self, script: &str, args: Vec<Value>) -> Result<Value> {
        self.command(
            Method::POST,
            "/execute/sync",
            Some(json!({ "script": script, "args": args })),
        )
        .await
    }

    /// Polls `document.readyState` until it is `complete` or `budget` runs out.
    pub async fn wait_until_ready(&self, budget: Duration) -> Result<LoadOutcome> {
        let deadline = Instant::now() + budget;
        loop {
            match self.evaluate("return document.readyState", vec![]).await {
                Ok(Value::String(s)) if s == "complete" => return Ok(LoadOutcome::Complete),
                Ok(_) => {}
                Err(e) if e.is_session_dead() => return Err(e),
                // scripts race with navigations that are still committing
                Err(_) => {}
            }
            if Instant::now() >= deadline {
                return Ok(LoadOutcome::Timeout);
            }
            tokio::time::sleep(Duration::from_millis(100)).await;
        }
    }

    /// Captures the visible viewport as a raster. Callers scroll to the top first.
    pub async fn screenshot_viewport(&self) -> Result<Raster> {
        if self.viewport.width == 0 || self.viewport.height == 0 {
            return Err(WebDriverError::EmptyViewport);
        }
        let v = self.command(Method::GET, "/screenshot", None).await?;
        let b64 = v
            .as_str()
            .ok_or_else(|| WebDriverError::Decode("screenshot is not a string".into()))?;
        let png = base64::engine::general_purpose::STANDARD
            .decode(b64)
            .map_err(|e| WebDriverError::Decode(format!("screenshot base64: {e}")))?;
        let raster = Raster::from_png(&png).map_err(|e| WebDriverError::Decode(e.to_string()))?;
        if raster.is_empty() {
            return Err(WebDriverError::EmptyViewport);
        }
        Ok(raster)
    }

    pub async fn find_element(&self, css: &str) -> Result<ElementRef> {
        let v = self
            .command(
                Method::POST,
                "/element",
                Some(json!({ "using": "css selector", "value": css })),
            )
            .await?;
        v[ELEMENT_KEY]
            .as_str()
            .map(|id| ElementRef(id.to_string()))
            .ok_or_else(|| WebDriverError::Decode(format!("element reference missing: {v}")))
    }

    pub async fn click(&self, element: &ElementRef) -> Result<()> {
        self.command(Method::POST, &format!("/element/{}/click", element.0), Some(json!({})))
            .await
            .map(drop)
    }

    pub async fn window_handles(&self) -> Result<Vec<String>> {
        let v = self.command(Method::GET, "/window/handles", None).await?;
        serde_json::from_value(v).map_err(|e| WebDriverError::Decode(e.to_string()))
    }

    pub async fn current_window(&self) -> Result<String> {
        let v = self.command(Method::GET, "/window", None).await?;
        serde_json::from_value(v).map_err(|e| WebDriverError::Decode(e.to_string()))
    }

    pub async fn switch_to_window(&self, handle: &str) -> Result<()> {
        self.command(Method::POST, "/window", Some(json!({ "handle": handle })))
            .await
            .map(drop)
    }

    /// Closes the current window; the session stays alive while others remain.
    pub async fn close_window(&self) -> Result<()> {
        self.command(Method::DELETE, "/window", None).await.map(drop)
    }

    /// Adjusts the outer window until the layout viewport has the configured size.
    async fn ensure_viewport(&self) -> Result<()> {
        for _ in 0..3 {
            let v = self
                .evaluate("return [window.innerWidth, window.innerHeight]", vec![])
                .await?;
            let inner = (v[0].as_i64().unwrap_or(0), v[1].as_i64().unwrap_or(0));
            let want = (i64::from(self.viewport.width), i64::from(self.viewport.height));
            if inner == want {
                return Ok(());
            }
            let rect = self.command(Method::GET, "/window/rect", None).await?;
            let outer = (rect["width"].as_i64().unwrap_or(want.0), rect["height"].as_i64().unwrap_or(want.1));
            let target = (outer.0 + want.0 - inner.0, outer.1 + want.1 - inner.1);
            self.command(
                Method::POST,
                "/window/rect",
                Some(json!({ "width": target.0, "height": target.1 })),
            )
            .await?;
        }
        tracing::warn!(session = %self.id, "viewport could not be pinned exactly");
        Ok(())
    }

    /// Ends the session and disposes its profile. Closing twice is a no-op,
    /// and closing while another command is pending aborts that command.
    pub async fn close(&self) {
        if self.closed.swap(true, Ordering::SeqCst) {
            return;
        }
        let res = self
            .http
            .delete(&self.base)
            .timeout(self.page_timeout + Duration::from_secs(10))
            .send()
            .await;
        if let Err(e) = res {
            tracing::debug!(session = %self.id, error = %e, "session delete failed");
        }
    }
}

impl Drop for BrowserSession {
    fn drop(&mut self) {
        if self.closed.swap(true, Ordering::SeqCst) {
            return;
        }
        if let Ok(handle) = tokio::runtime::Handle::try_current() {
            let req = self.http.delete(&self.base);
            handle.spawn(async move {
                let _ = req.send().await;
            });
        }
    }
}

/// Chrome and Firefox both swap in an internal page when a load fails.
pub fn is_error_page(url: &str) -> bool {
    url.starts_with("chrome-error://") || url.starts_with("about:neterror") || url.starts_with("about:certerror")
}
