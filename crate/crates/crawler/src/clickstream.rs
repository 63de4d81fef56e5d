//! Clickstream generation by uniform random sampling, and replay.

use std::collections::HashSet;
use std::time::Duration;

use async_trait::async_trait;
use cookiediff_core::model::{ClickableDescriptor, Clickstream, StepOutcome, StepStatus};
use cookiediff_core::ApexDomain;
use rand::seq::SliceRandom;
use rand::Rng;
use url::Url;

use crate::scripts;
use crate::webdriver::{is_error_page, BrowserSession, LoadOutcome, Result, WebDriverError};

/// Called after landing (step 0) and after every successful click.
#[async_trait]
pub trait CaptureHook: Send {
    async fn capture(&mut self, session: &BrowserSession, step_index: usize) -> Result<()>;
}

/// Counts invocations. Useful when only the control flow matters.
#[derive(Debug, Default)]
pub struct CountingHook {
    pub steps: Vec<usize>,
}

#[async_trait]
impl CaptureHook for CountingHook {
    async fn capture(&mut self, _session: &BrowserSession, step_index: usize) -> Result<()> {
        self.steps.push(step_index);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClickTiming {
    /// Fixed pause after each click and after landing.
    pub settle: Duration,
    /// Upper bound on waiting for `document.readyState` after the pause.
    pub ready_budget: Duration,
}

impl Default for ClickTiming {
    fn default() -> Self {
        ClickTiming {
            settle: Duration::from_secs(3),
            ready_budget: Duration::from_secs(30),
        }
    }
}

/// The order in which the candidates of one step are tried: a uniformly
/// random permutation, so the first pick is uniform over all `n`.
pub fn sample_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

fn host_of(url: &str) -> Option<String> {
    Url::parse(url).ok()?.host_str().map(str::to_string)
}

fn on_apex(apex: &ApexDomain, url: &str) -> bool {
    host_of(url).is_some_and(|h| apex.covers_host(&h))
}

async fn settle(session: &BrowserSession, timing: ClickTiming) -> Result<()> {
    tokio::time::sleep(timing.settle).await;
    session.wait_until_ready(timing.ready_budget).await.map(drop)
}

/// Keeps a single logical page per session: a new same-apex tab replaces the
/// old one, and a new off-apex tab is closed.
async fn adopt_new_tabs(
    session: &BrowserSession,
    apex: &ApexDomain,
    before: &HashSet<String>,
    original: &str,
) -> Result<bool> {
    let opened: Vec<String> = session
        .window_handles()
        .await?
        .into_iter()
        .filter(|h| !before.contains(h))
        .collect();
    let mut left_domain = false;
    let mut adopted: Option<String> = None;
    for handle in opened {
        session.switch_to_window(&handle).await?;
        session.wait_until_ready(Duration::from_secs(5)).await?;
        let url = session.current_url().await?;
        if adopted.is_none() && !is_error_page(&url) && on_apex(apex, &url) {
            adopted = Some(handle);
        } else {
            left_domain |= !on_apex(apex, &url);
            session.close_window().await?;
        }
    }
    match adopted {
        Some(handle) => {
            session.switch_to_window(original).await?;
            session.close_window().await?;
            session.switch_to_window(&handle).await?;
        }
        None => session.switch_to_window(original).await?,
    }
    Ok(left_domain)
}

/// Resolves and clicks one descriptor, then waits for the page to settle.
pub async fn attempt_click(
    session: &BrowserSession,
    apex: &ApexDomain,
    descriptor: &ClickableDescriptor,
    index: usize,
    timing: ClickTiming,
) -> Result<StepOutcome> {
    let outcome = |status, landed_url: String| StepOutcome {
        index,
        status,
        landed_url,
    };
    let status = scripts::resolve_selector(session, &descriptor.selector).await?;
    if !status.found {
        return Ok(outcome(StepStatus::SelectorUnresolved, session.current_url().await?));
    }
    let element = match session.find_element(&descriptor.selector).await {
        Ok(el) => el,
        Err(e) if e.is_session_dead() => return Err(e),
        Err(_) => return Ok(outcome(StepStatus::SelectorUnresolved, session.current_url().await?)),
    };
    let original = session.current_window().await?;
    let before: HashSet<String> = session.window_handles().await?.into_iter().collect();

    match session.click(&element).await {
        Ok(()) | Err(WebDriverError::Timeout(_)) => {}
        Err(e) if e.is_session_dead() => return Err(e),
        Err(e) => {
            tracing::debug!(selector = %descriptor.selector, error = %e, "click failed");
            return Ok(outcome(StepStatus::ClickFailed, session.current_url().await?));
        }
    }
    settle(session, timing).await?;

    if adopt_new_tabs(session, apex, &before, &original).await? {
        return Ok(outcome(StepStatus::OffDomain, session.current_url().await?));
    }
    let landed = session.current_url().await?;
    let status = if is_error_page(&landed) {
        StepStatus::ClickFailed
    } else if !on_apex(apex, &landed) {
        StepStatus::OffDomain
    } else {
        StepStatus::Clicked
    };
    Ok(outcome(status, landed))
}

async fn land(session: &BrowserSession, landing_url: &str, timing: ClickTiming) -> Result<()> {
    if session.navigate(landing_url).await? == LoadOutcome::Timeout {
        tracing::debug!(%landing_url, "landing page timed out, capturing what loaded");
    }
    settle(session, timing).await
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub clickstream: Clickstream,
    /// One `Clicked` outcome per step, followed by `OffDomain` if the stream
    /// ended by leaving the site.
    pub outcomes: Vec<StepOutcome>,
}

/// Builds a clickstream of up to `k` steps starting at `landing_url`.
///
/// Each step enumerates the clickables of the current page and tries them in
/// a random order until one click succeeds. The stream ends early when no
/// candidate works or a click leaves the apex domain.
#[allow(clippy::too_many_arguments)]
pub async fn generate_clickstream<R: Rng + Send>(
    session: &BrowserSession,
    apex: &ApexDomain,
    landing_url: &str,
    k: usize,
    seed: u64,
    rng: &mut R,
    capture: &mut dyn CaptureHook,
    timing: ClickTiming,
) -> Result<Generated> {
    land(session, landing_url, timing).await?;
    capture.capture(session, 0).await?;
    let mut steps = Vec::with_capacity(k);
    let mut outcomes = Vec::with_capacity(k);
    'steps: while steps.len() < k {
        let clickables = scripts::enumerate_clickables(session).await?;
        let index = steps.len() + 1;
        for pick in sample_order(clickables.len(), rng) {
            let candidate = &clickables[pick];
            let outcome = attempt_click(session, apex, candidate, index, timing).await?;
            match outcome.status {
                StepStatus::Clicked => {
                    steps.push(candidate.clone());
                    outcomes.push(outcome);
                    capture.capture(session, index).await?;
                    continue 'steps;
                }
                StepStatus::OffDomain => {
                    outcomes.push(outcome);
                    break 'steps;
                }
                StepStatus::SelectorUnresolved | StepStatus::ClickFailed => {}
            }
        }
        break;
    }
    Ok(Generated {
        clickstream: Clickstream {
            domain: apex.name.clone(),
            seed,
            target_length: k,
            steps,
        },
        outcomes,
    })
}

#[derive(Debug)]
pub struct Traversal {
    pub outcomes: Vec<StepOutcome>,
    /// Set when the session died part way; `outcomes` holds what completed.
    pub error: Option<WebDriverError>,
}

/// Replays `clickstream` from a fresh navigation to `landing_url`, halting at
/// the first step that does not click cleanly.
pub async fn traverse_clickstream(
    session: &BrowserSession,
    apex: &ApexDomain,
    landing_url: &str,
    clickstream: &Clickstream,
    capture: &mut dyn CaptureHook,
    timing: ClickTiming,
) -> Traversal {
    let mut outcomes = Vec::with_capacity(clickstream.steps.len());
    let run = async {
        land(session, landing_url, timing).await?;
        capture.capture(session, 0).await?;
        for (i, step) in clickstream.steps.iter().enumerate() {
            let outcome = attempt_click(session, apex, step, i + 1, timing).await?;
            let clicked = outcome.status == StepStatus::Clicked;
            outcomes.push(outcome);
            if !clicked {
                break;
            }
            capture.capture(session, i + 1).await?;
        }
        Ok::<_, WebDriverError>(())
    };
    let error = run.await.err();
    Traversal { outcomes, error }
}
