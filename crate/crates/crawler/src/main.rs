use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use cookiediff::orchestrator::ClickTimingConfig;
use cookiediff::{
    analyze_store, run_campaign, BrowserConfig, BrowserKind, BrowserRunner, CampaignOptions, DriverProcess,
    RunConfig, Store, Viewport,
};
use cookiediff_core::{load_domain_list, AdDomains, DEFAULT_CHUNK_PX};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "cookiediff", version, about = "Measure what changes on a site when third-party cookies are blocked")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crawl a ranked domain list into a store directory.
    Crawl(CrawlArgs),
    /// Compute summaries and CDF tables from a store directory.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct CrawlArgs {
    /// File of `rank,domain` lines.
    #[arg(long)]
    domains: PathBuf,
    #[arg(long)]
    limit: Option<usize>,
    /// Clickstream length.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Capture points per group before a domain is complete.
    #[arg(long, default_value_t = 50)]
    quota: usize,
    /// Per-domain budget in minutes.
    #[arg(long = "domain-timeout", default_value_t = 60.0)]
    domain_timeout: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// WebDriver endpoint. Ignored when --spawn-driver is given.
    #[arg(long, default_value = "http://127.0.0.1:9515")]
    driver: String,
    /// Start this driver executable instead of connecting to --driver.
    #[arg(long = "spawn-driver")]
    spawn_driver: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = BrowserKind::Chrome)]
    browser: BrowserKind,
    #[arg(long = "browser-binary")]
    browser_binary: Option<PathBuf>,
    /// Extra browser command-line argument; repeatable.
    #[arg(long = "browser-arg", allow_hyphen_values = true)]
    browser_args: Vec<String>,
    /// Page load budget in seconds.
    #[arg(long = "page-timeout", default_value_t = 30.0)]
    page_timeout: f64,
    /// Pause after every click and page load, in milliseconds.
    #[arg(long = "settle-ms", default_value_t = 3000)]
    settle_ms: u64,
    /// Minimum rounds per domain, even after the quota is met.
    #[arg(long = "min-rounds", default_value_t = 1)]
    min_rounds: usize,
    /// Port appended to every resolver candidate URL.
    #[arg(long)]
    port: Option<u16>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// EasyList-style file of advertising domains.
    #[arg(long = "ad-domains")]
    ad_domains: Option<PathBuf>,
}

fn seconds(value: f64, what: &str) -> anyhow::Result<Duration> {
    if !(value.is_finite() && value > 0.0) {
        bail!("{what} must be a positive number");
    }
    Ok(Duration::from_secs_f64(value))
}

async fn crawl(args: CrawlArgs) -> anyhow::Result<()> {
    let list = load_domain_list(&args.domains, args.limit).context("reading domain list")?;
    if list.malformed > 0 {
        tracing::warn!(malformed = list.malformed, "skipped malformed domain lines");
    }
    let driver = match &args.spawn_driver {
        Some(binary) => Some(DriverProcess::spawn(binary).await?),
        None => None,
    };
    let endpoint = driver.as_ref().map_or(args.driver.clone(), |d| d.endpoint().to_string());
    let page_timeout = seconds(args.page_timeout, "--page-timeout")?;
    let config = RunConfig {
        k: args.k,
        quota: args.quota,
        min_rounds: args.min_rounds,
        domain_timeout: seconds(args.domain_timeout * 60.0, "--domain-timeout")?,
        timing: ClickTimingConfig {
            settle: Duration::from_millis(args.settle_ms),
            ready_budget: page_timeout,
        },
        seed: args.seed,
        browser: BrowserConfig {
            endpoint,
            kind: args.browser,
            binary: args.browser_binary,
            viewport: Viewport::default(),
            page_timeout,
            script_timeout: page_timeout,
            extra_args: args.browser_args,
        },
        port: args.port,
        round_retries: 1,
        chunk_px: DEFAULT_CHUNK_PX,
    };
    config.validate()?;
    let store = Store::open(&args.out).context("opening store")?;
    let options = CampaignOptions {
        workers: args.workers,
        config: serde_json::to_value(&config)?,
        round_retries: config.round_retries,
        malformed_lines: list.malformed,
    };
    let manifest = run_campaign(list.domains, Arc::new(BrowserRunner { config }), &store, options).await?;
    if let Some(driver) = driver {
        driver.shutdown().await;
    }
    for (status, n) in &manifest.statuses {
        println!("{status}: {n}");
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let ads = match &args.ad_domains {
        Some(path) => AdDomains::load(path).context("reading ad domain list")?,
        None => AdDomains::default(),
    };
    if !args.store.is_dir() {
        bail!("store {} does not exist", args.store.display());
    }
    let store = Store::open(&args.store)?;
    let report = analyze_store(&store, &args.out, &ads, DEFAULT_CHUNK_PX)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Crawl(args) => crawl(args).await,
        Command::Analyze(args) => analyze(args),
    }
}
