//! Differential crawling: each site is visited by three browser profiles
//! replaying the same random clickstream, the last one with third-party
//! cookies blocked, and the captured pages are compared.

pub mod analyze;
pub mod capture;
pub mod clickstream;
pub mod driver;
pub mod orchestrator;
pub mod resolver;
pub mod scripts;
pub mod store;
pub mod webdriver;

pub use analyze::{analyze_store, AnalysisReport};
pub use clickstream::{attempt_click, generate_clickstream, traverse_clickstream, CaptureHook, ClickTiming};
pub use driver::DriverProcess;
pub use orchestrator::{run_campaign, run_domain, BrowserRunner, CampaignOptions, DomainRunner, Manifest, RunConfig};
pub use resolver::{candidate_urls, resolve_domain};
pub use store::Store;
pub use webdriver::{open_session, BrowserConfig, BrowserKind, BrowserSession, LoadOutcome, Viewport, WebDriverError};
