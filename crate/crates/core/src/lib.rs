//! Metrics and record types for differential third-party-cookie crawls.
//!
//! A crawl visits each site three times: a *baseline* group that generates
//! clickstreams, a *control* group that replays them under identical
//! conditions, and an *experimental* group that replays them with all
//! third-party cookies blocked. This crate holds everything that does not need
//! a browser: screenshot chunking and shingling, the BCE screenshot
//! difference, multiset Jaccard distance and difference-in-distance, capture
//! pairing, per-domain summaries and CDF output.

pub mod ads;
pub mod bce;
pub mod cdf;
pub mod distance;
pub mod domain;
mod error;
pub mod model;
pub mod pairing;
pub mod raster;
pub mod shingle;
pub mod vector;

pub use ads::{count_ad_requests, AdDomains};
pub use bce::{bce_chunk_map, bce_screenshot_difference, BceOutcome, ChunkClass, SkipReason};
pub use distance::{did, jaccard_distance, FeatureKind};
pub use domain::{load_domain_list, parse_domain_list, ApexDomain, DomainList};
pub use error::{Error, Result};
pub use raster::{chunk_grid, Chunk, Raster, DEFAULT_CHUNK_PX};
pub use shingle::shingle_image;
pub use vector::{list_to_vector, tokenize_text, FrequencyVector};
