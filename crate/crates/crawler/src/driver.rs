//! Launching a local chromedriver or geckodriver for the duration of a run.

use std::net::TcpListener;
use std::path::Path;
use std::process::Stdio;
use std::time::{Duration, Instant};

use tokio::process::{Child, Command};

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("cannot start {binary}: {source}")]
    Spawn {
        binary: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no free local port: {0}")]
    Port(std::io::Error),
    #[error("{0} did not become ready within {1:?}")]
    NotReady(String, Duration),
}

/// A driver child process. It is killed when dropped.
#[derive(Debug)]
pub struct DriverProcess {
    child: Child,
    endpoint: String,
}

fn free_port() -> Result<u16, DriverError> {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(DriverError::Port)?;
    Ok(listener.local_addr().map_err(DriverError::Port)?.port())
}

impl DriverProcess {
    /// Starts `binary --port=<free port>` and waits until `/status` reports ready.
    pub async fn spawn(binary: &Path) -> Result<Self, DriverError> {
        let port = free_port()?;
        let child = Command::new(binary)
            .arg(format!("--port={port}"))
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .kill_on_drop(true)
            .spawn()
            .map_err(|source| DriverError::Spawn {
                binary: binary.display().to_string(),
                source,
            })?;
        let endpoint = format!("http://127.0.0.1:{port}");
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(2))
            .build()
            .expect("static client configuration");
        let budget = Duration::from_secs(20);
        let deadline = Instant::now() + budget;
        loop {
            let ready = async {
                let v: serde_json::Value = http.get(format!("{endpoint}/status")).send().await.ok()?.json().await.ok()?;
                v["value"]["ready"].as_bool()
            };
            if ready.await == Some(true) {
                return Ok(DriverProcess { child, endpoint });
            }
            if Instant::now() >= deadline {
                return Err(DriverError::NotReady(binary.display().to_string(), budget));
            }
            tokio::time::sleep(Duration::from_millis(50)).await;
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub async fn shutdown(mut self) {
        let _ = self.child.kill().await;
    }
}
