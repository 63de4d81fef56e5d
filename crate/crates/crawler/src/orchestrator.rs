//! Per-domain crawl protocol and the campaign driver around it.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::num::NonZeroU32;
use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use cookiediff_core::model::{
    CaptureRecord, CookiePolicy, DomainRecord, Group, GroupRun, Round, TerminationStatus,
};
use cookiediff_core::{ApexDomain, DEFAULT_CHUNK_PX};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tokio::sync::Semaphore;
use tokio::task::JoinSet;

use crate::capture::{capture_feature_set, now_ms};
use crate::clickstream::{generate_clickstream, traverse_clickstream, CaptureHook, ClickTiming};
use crate::resolver::resolve_domain;
use crate::store::{screenshot_path, Store, StoreError};
use crate::webdriver::{open_session, BrowserConfig, BrowserSession, WebDriverError};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("feature quota must be at least 1")]
    ZeroQuota,
    #[error("{0} must be positive")]
    ZeroDuration(&'static str),
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Clickstream length.
    pub k: usize,
    /// Capture points each group must collect before a domain is complete.
    pub quota: usize,
    /// Rounds to run even after the quota is met.
    pub min_rounds: usize,
    pub domain_timeout: Duration,
    pub timing: ClickTimingConfig,
    pub seed: u64,
    pub browser: BrowserConfig,
    /// Port appended to resolver candidates, for hermetic runs.
    pub port: Option<u16>,
    pub round_retries: u32,
    pub chunk_px: NonZeroU32,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClickTimingConfig {
    pub settle: Duration,
    pub ready_budget: Duration,
}

impl From<ClickTimingConfig> for ClickTiming {
    fn from(t: ClickTimingConfig) -> Self {
        ClickTiming {
            settle: t.settle,
            ready_budget: t.ready_budget,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 5,
            quota: 50,
            min_rounds: 1,
            domain_timeout: Duration::from_secs(60 * 60),
            timing: ClickTimingConfig {
                settle: Duration::from_secs(3),
                ready_budget: Duration::from_secs(30),
            },
            seed: 0,
            browser: BrowserConfig::default(),
            port: None,
            round_retries: 1,
            chunk_px: DEFAULT_CHUNK_PX,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.quota == 0 {
            return Err(ConfigError::ZeroQuota);
        }
        for (name, d) in [
            ("domain timeout", self.domain_timeout),
            ("page timeout", self.browser.page_timeout),
            ("script timeout", self.browser.script_timeout),
        ] {
            if d.is_zero() {
                return Err(ConfigError::ZeroDuration(name));
            }
        }
        Ok(())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one round's clickstream, derived from the campaign seed so that
/// reruns sample the same clicks.
pub fn round_seed(seed: u64, domain: &str, round: usize) -> u64 {
    splitmix64(splitmix64(seed ^ fnv1a(domain.as_bytes())) ^ round as u64)
}

#[derive(Debug, thiserror::Error)]
enum CrawlError {
    #[error(transparent)]
    WebDriver(#[from] WebDriverError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0} session died: {1}")]
    GroupDied(Group, String),
    #[error("baseline captured nothing on {0}")]
    NoCaptures(String),
}

/// Captures into the store under `round-NNN/<group>/`.
struct StoreCapture<'a> {
    store: &'a Store,
    domain: &'a str,
    round: usize,
    group: Group,
    chunk_px: NonZeroU32,
    captures: Vec<CaptureRecord>,
}

#[async_trait]
impl CaptureHook for StoreCapture<'_> {
    async fn capture(&mut self, session: &BrowserSession, step_index: usize) -> crate::webdriver::Result<()> {
        let record = match capture_feature_set(session, step_index, self.chunk_px).await {
            Ok(features) => {
                let rel = screenshot_path(self.round, self.group, step_index);
                match self.store.write_screenshot(self.domain, &rel, &features.screenshot) {
                    Ok(()) => CaptureRecord::from_feature_set(&features, rel),
                    Err(e) => CaptureRecord::failed(step_index, now_ms(), e.to_string()),
                }
            }
            Err(e) if e.is_session_dead() => return Err(e),
            Err(e) => {
                tracing::debug!(group = %self.group, step_index, error = %e, "capture failed");
                CaptureRecord::failed(step_index, now_ms(), e.to_string())
            }
        };
        self.captures.push(record);
        Ok(())
    }
}

/// The three group sessions of one domain plus the short-lived resolver
/// session. Group profiles persist across rounds.
#[derive(Default)]
struct Sessions {
    resolver: Option<BrowserSession>,
    groups: HashMap<Group, BrowserSession>,
}

impl Sessions {
    async fn group(
        &mut self,
        group: Group,
        config: &BrowserConfig,
        domain: &str,
    ) -> Result<&BrowserSession, WebDriverError> {
        Ok(match self.groups.entry(group) {
            Entry::Occupied(slot) => slot.into_mut(),
            Entry::Vacant(slot) => {
                slot.insert(open_session(config, group.policy(), &format!("{domain}-{group}")).await?)
            }
        })
    }

    async fn discard(&mut self, group: Group) {
        if let Some(session) = self.groups.remove(&group) {
            session.close().await;
        }
    }

    async fn close_all(&mut self) {
        if let Some(s) = self.resolver.take() {
            s.close().await;
        }
        for (_, s) in self.groups.drain() {
            s.close().await;
        }
    }
}

async fn run_round(
    sessions: &mut Sessions,
    apex: &ApexDomain,
    landing: &str,
    index: usize,
    config: &RunConfig,
    store: &Store,
) -> Result<Round, CrawlError> {
    let domain = apex.name.as_str();
    let timing: ClickTiming = config.timing.into();
    let seed = round_seed(config.seed, domain, index);
    let hook = |group| StoreCapture {
        store,
        domain,
        round: index,
        group,
        chunk_px: config.chunk_px,
        captures: Vec::new(),
    };

    let started_at_ms = now_ms();
    let session = match sessions.group(Group::Baseline, &config.browser, domain).await {
        Ok(s) => s,
        Err(e) => return Err(e.into()),
    };
    let profile_tag = session.profile_tag().to_string();
    let mut capture = hook(Group::Baseline);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generated = generate_clickstream(session, apex, landing, config.k, seed, &mut rng, &mut capture, timing).await;
    let generated = match generated {
        Ok(g) => g,
        Err(e) => {
            if e.is_session_dead() {
                sessions.discard(Group::Baseline).await;
            }
            return Err(e.into());
        }
    };
    if capture.captures.iter().all(|c| !c.is_complete()) {
        return Err(CrawlError::NoCaptures(landing.to_string()));
    }
    store.write_clickstream(domain, index, &generated.clickstream)?;
    let mut groups = vec![GroupRun {
        group: Group::Baseline,
        policy: CookiePolicy::AllowAll,
        profile_tag,
        outcomes: generated.outcomes,
        captures: capture.captures,
        started_at_ms,
        finished_at_ms: now_ms(),
        error: None,
    }];

    for group in [Group::Control, Group::Experimental] {
        let started_at_ms = now_ms();
        let session = sessions.group(group, &config.browser, domain).await?;
        let profile_tag = session.profile_tag().to_string();
        let mut capture = hook(group);
        let traversal =
            traverse_clickstream(session, apex, landing, &generated.clickstream, &mut capture, timing).await;
        if let Some(e) = &traversal.error {
            if e.is_session_dead() {
                sessions.discard(group).await;
                return Err(CrawlError::GroupDied(group, e.to_string()));
            }
        }
        groups.push(GroupRun {
            group,
            policy: group.policy(),
            profile_tag,
            outcomes: traversal.outcomes,
            captures: capture.captures,
            started_at_ms,
            finished_at_ms: now_ms(),
            error: traversal.error.map(|e| e.to_string()),
        });
    }

    Ok(Round {
        index,
        clickstream: generated.clickstream,
        groups,
    })
}

fn quota_met(record: &DomainRecord, quota: usize) -> bool {
    Group::ALL.iter().all(|&g| record.captures_for(g) >= quota)
}

async fn crawl_domain(
    record: &mut DomainRecord,
    sessions: &mut Sessions,
    config: &RunConfig,
    store: &Store,
) -> Result<TerminationStatus, CrawlError> {
    let apex = record.apex.clone();
    let resolver = sessions
        .resolver
        .insert(open_session(&config.browser, CookiePolicy::AllowAll, &format!("{}-resolve", apex.name)).await?);
    let resolved = resolve_domain(&apex, resolver, config.port).await?;
    if let Some(s) = sessions.resolver.take() {
        s.close().await;
    }
    let succeeded = resolved.succeeded;
    let landing = resolved.url.clone();
    record.resolution = Some(resolved);
    store.save_record(record)?;
    if !succeeded {
        return Ok(TerminationStatus::ResolutionFailed);
    }

    loop {
        if quota_met(record, config.quota) && record.rounds.len() >= config.min_rounds {
            return Ok(TerminationStatus::Complete);
        }
        let index = record.rounds.len();
        let mut failures = 0;
        let round = loop {
            match run_round(sessions, &apex, &landing, index, config, store).await {
                Ok(round) => break round,
                Err(e) if failures < config.round_retries => {
                    failures += 1;
                    record.retries += 1;
                    tracing::warn!(domain = %apex.name, round = index, error = %e, "round failed, retrying");
                }
                Err(e) => return Err(e),
            }
        };
        record.rounds.push(round);
        record.finished_at_ms = now_ms();
        store.save_record(record)?;
        tracing::info!(
            domain = %apex.name,
            round = index,
            baseline = record.captures_for(Group::Baseline),
            control = record.captures_for(Group::Control),
            experimental = record.captures_for(Group::Experimental),
            "round persisted"
        );
    }
}

/// Crawls one domain to completion, timeout or failure. The returned record
/// has also been written to the store.
pub async fn run_domain(apex: &ApexDomain, config: &RunConfig, store: &Store) -> DomainRecord {
    let mut record = DomainRecord::new(apex.clone(), now_ms());
    if let Err(e) = store.save_record(&record) {
        record.status = TerminationStatus::Crashed;
        record.error = Some(e.to_string());
        return record;
    }
    let mut sessions = Sessions::default();
    let outcome = tokio::time::timeout(
        config.domain_timeout,
        crawl_domain(&mut record, &mut sessions, config, store),
    )
    .await;
    sessions.close_all().await;
    match outcome {
        Ok(Ok(status)) => record.status = status,
        Ok(Err(e)) => {
            record.status = TerminationStatus::Crashed;
            record.error = Some(e.to_string());
        }
        Err(_) => record.status = TerminationStatus::Timeout,
    }
    record.finished_at_ms = now_ms();
    if let Err(e) = store.save_record(&record) {
        tracing::error!(domain = %apex.name, error = %e, "final record write failed");
    }
    tracing::info!(domain = %apex.name, status = ?record.status, rounds = record.rounds.len(), "domain finished");
    record
}

/// Crawls one domain. Implementations must persist the record they return.
#[async_trait]
pub trait DomainRunner: Send + Sync {
    async fn run(&self, apex: &ApexDomain, store: &Store) -> DomainRecord;
}

#[derive(Clone, Debug)]
pub struct BrowserRunner {
    pub config: RunConfig,
}

#[async_trait]
impl DomainRunner for BrowserRunner {
    async fn run(&self, apex: &ApexDomain, store: &Store) -> DomainRecord {
        run_domain(apex, &self.config, store).await
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub rank: u32,
    pub domain: String,
    pub status: TerminationStatus,
    /// True when an earlier run had already finished this domain.
    pub reused: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub started_at_ms: u64,
    pub finished_at_ms: Option<u64>,
    pub workers: usize,
    pub config: serde_json::Value,
    pub retry_policy: String,
    pub resume_policy: &'static str,
    pub malformed_lines: usize,
    pub statuses: BTreeMap<String, usize>,
    pub domains: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, Default)]
pub struct CampaignOptions {
    pub workers: usize,
    /// Serialized run configuration, recorded verbatim in the manifest.
    pub config: serde_json::Value,
    pub round_retries: u32,
    pub malformed_lines: usize,
}

fn status_key(status: TerminationStatus) -> String {
    serde_json::to_value(status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Crawls `domains` with at most `options.workers` in flight. Domains that
/// already have a finished record are not crawled again; records left in
/// progress by an interrupted run are discarded and redone. A failure or
/// panic while crawling one domain is recorded as `Crashed` and never stops
/// the others. Only an unwritable store is fatal.
pub async fn run_campaign<R: DomainRunner + 'static>(
    domains: Vec<ApexDomain>,
    runner: Arc<R>,
    store: &Store,
    options: CampaignOptions,
) -> Result<Manifest, StoreError> {
    let workers = options.workers.max(1);
    let mut manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        started_at_ms: now_ms(),
        finished_at_ms: None,
        workers,
        config: options.config,
        retry_policy: format!("{} retry per failed round, then the domain is marked crashed", options.round_retries),
        resume_policy: "finished records are kept; in-progress records are recrawled",
        malformed_lines: options.malformed_lines,
        statuses: BTreeMap::new(),
        domains: Vec::new(),
    };
    store.write_manifest(&manifest)?;

    let permits = Arc::new(Semaphore::new(workers));
    let mut tasks = JoinSet::new();
    let mut in_flight = HashMap::new();
    let mut entries = Vec::with_capacity(domains.len());
    for apex in domains {
        match store.load_record(&apex.name) {
            Ok(Some(existing)) if existing.status != TerminationStatus::InProgress => {
                entries.push(ManifestEntry {
                    rank: apex.rank,
                    domain: apex.name.clone(),
                    status: existing.status,
                    reused: true,
                });
                continue;
            }
            Ok(Some(_)) | Err(_) => store.reset_domain(&apex.name)?,
            Ok(None) => {}
        }
        let runner = Arc::clone(&runner);
        let permits = Arc::clone(&permits);
        let task_store = store.clone();
        let task_apex = apex.clone();
        let handle = tasks.spawn(async move {
            let _permit = permits.acquire_owned().await.expect("semaphore is never closed");
            runner.run(&task_apex, &task_store).await
        });
        in_flight.insert(handle.id(), apex);
    }

    while let Some(joined) = tasks.join_next_with_id().await {
        let record = match joined {
            Ok((_, record)) => record,
            Err(err) => {
                let apex = in_flight
                    .get(&err.id())
                    .cloned()
                    .expect("every task id is registered");
                let message = if err.is_panic() {
                    let payload = err.into_panic();
                    payload
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| payload.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "worker panicked".into())
                } else {
                    err.to_string()
                };
                tracing::error!(domain = %apex.name, %message, "domain worker failed");
                let mut record = store
                    .load_record(&apex.name)
                    .ok()
                    .flatten()
                    .unwrap_or_else(|| DomainRecord::new(apex.clone(), now_ms()));
                record.status = TerminationStatus::Crashed;
                record.error = Some(format!("worker panicked: {message}"));
                record.finished_at_ms = now_ms();
                store.save_record(&record)?;
                record
            }
        };
        entries.push(ManifestEntry {
            rank: record.apex.rank,
            domain: record.apex.name.clone(),
            status: record.status,
            reused: false,
        });
    }

    entries.sort_by(|a, b| (a.rank, &a.domain).cmp(&(b.rank, &b.domain)));
    for entry in &entries {
        *manifest.statuses.entry(status_key(entry.status)).or_default() += 1;
    }
    manifest.domains = entries;
    manifest.finished_at_ms = Some(now_ms());
    store.write_manifest(&manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_seeds_differ_by_domain_and_round() {
        let a = round_seed(1, "a.test", 0);
        assert_eq!(a, round_seed(1, "a.test", 0));
        assert_ne!(a, round_seed(1, "a.test", 1));
        assert_ne!(a, round_seed(1, "b.test", 0));
        assert_ne!(a, round_seed(2, "a.test", 0));
    }

    #[test]
    fn validation_rejects_degenerate_configs() {
        assert!(RunConfig::default().validate().is_ok());
        let zero_quota = RunConfig {
            quota: 0,
            ..RunConfig::default()
        };
        assert!(matches!(zero_quota.validate(), Err(ConfigError::ZeroQuota)));
        let zero_timeout = RunConfig {
            domain_timeout: Duration::ZERO,
            ..RunConfig::default()
        };
        assert!(zero_timeout.validate().is_err());
    }

    #[test]
    fn status_keys_are_snake_case() {
        assert_eq!(status_key(TerminationStatus::ResolutionFailed), "resolution_failed");
    }
}
