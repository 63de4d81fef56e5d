//! Feature capture at one point of a traversal.

use std::num::NonZeroU32;
use std::time::{SystemTime, UNIX_EPOCH};

use cookiediff_core::model::FeatureSet;
use cookiediff_core::{list_to_vector, shingle_image, tokenize_text};

use crate::scripts;
use crate::webdriver::{BrowserSession, Result, WebDriverError};

pub(crate) fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Scrolls to the top, screenshots the viewport and extracts the content
/// features of the current page.
pub async fn capture_feature_set(
    session: &BrowserSession,
    step_index: usize,
    chunk_px: NonZeroU32,
) -> Result<FeatureSet> {
    scripts::scroll_top(session).await?;
    let screenshot = session.screenshot_viewport().await?;
    let captured_at_ms = now_ms();
    let text = scripts::extract_text(session).await?;
    let image_srcs = scripts::extract_image_sources(session).await?;
    let links = scripts::extract_link_targets(session).await?;
    let resource_urls = scripts::extract_resource_urls(session).await?;
    let shingles =
        shingle_image(&screenshot, chunk_px).map_err(|e| WebDriverError::Decode(e.to_string()))?;
    Ok(FeatureSet {
        step_index,
        screenshot,
        shingles,
        words: tokenize_text(&text),
        image_srcs: list_to_vector(&image_srcs),
        links: list_to_vector(&links),
        resource_urls,
        captured_at_ms,
    })
}
