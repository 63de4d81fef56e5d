#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Duration;

use cookiediff::{BrowserConfig, DriverProcess};
use cookiediff_fixtures::{serve, FixtureConfig, FixtureServer};
use tokio::sync::{Mutex, MutexGuard};

pub fn chromedriver() -> PathBuf {
    std::env::var_os("COOKIEDIFF_CHROMEDRIVER")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("/opt/chrome/chromedriver"))
}

pub fn browser_binary() -> Option<PathBuf> {
    std::env::var_os("COOKIEDIFF_BROWSER_BINARY")
        .map(PathBuf::from)
        .or_else(|| Some(PathBuf::from("/opt/chrome/chromium-wrapper")).filter(|p| p.exists()))
}

/// Maps every `*.test` host onto the loopback fixture server and makes
/// `*.invalid` fail name resolution immediately.
pub const HOST_RULES: &str = "--host-resolver-rules=MAP *.test 127.0.0.1, MAP *.invalid ~NOTFOUND";

pub fn browser_config(endpoint: &str) -> BrowserConfig {
    BrowserConfig {
        endpoint: endpoint.to_string(),
        binary: browser_binary(),
        page_timeout: Duration::from_secs(20),
        script_timeout: Duration::from_secs(20),
        extra_args: vec![HOST_RULES.to_string()],
        ..BrowserConfig::default()
    }
}

/// One browser at a time: the machines these run on are small.
static BROWSER_LOCK: OnceLock<Mutex<()>> = OnceLock::new();

pub struct Harness {
    pub driver: DriverProcess,
    pub server: FixtureServer,
    pub config: BrowserConfig,
    _guard: MutexGuard<'static, ()>,
}

pub async fn harness() -> Harness {
    let guard = BROWSER_LOCK.get_or_init(|| Mutex::new(())).lock().await;
    let driver = DriverProcess::spawn(&chromedriver())
        .await
        .expect("chromedriver is required for browser tests (set COOKIEDIFF_CHROMEDRIVER)");
    let server = serve(FixtureConfig::default()).await.expect("fixture server");
    let config = browser_config(driver.endpoint());
    Harness {
        driver,
        server,
        config,
        _guard: guard,
    }
}

impl Harness {
    /// `http://<host>:<primary port><path>`
    pub fn at(&self, host: &str, path: &str) -> String {
        self.server.host_url(host, path)
    }
}
