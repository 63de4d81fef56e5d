//! In-page instrumentation. The JavaScript lives in `scripts/` and is
//! compiled into the binary.

use cookiediff_core::model::ClickableDescriptor;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::webdriver::{BrowserSession, Result, WebDriverError};

const SELECTOR_LIB: &str = include_str!("../scripts/selector.js");
const ENUMERATE_CLICKABLES: &str = include_str!("../scripts/enumerate_clickables.js");
const RESOLVE_SELECTOR: &str = include_str!("../scripts/resolve_selector.js");
const SCROLL_TOP: &str = include_str!("../scripts/scroll_top.js");
const EXTRACT_TEXT: &str = include_str!("../scripts/extract_text.js");
const EXTRACT_IMAGE_SOURCES: &str = include_str!("../scripts/extract_image_sources.js");
const EXTRACT_LINK_TARGETS: &str = include_str!("../scripts/extract_link_targets.js");
const EXTRACT_RESOURCE_URLS: &str = include_str!("../scripts/extract_resource_urls.js");
const PAGE_STATE: &str = include_str!("../scripts/page_state.js");

fn with_selector_lib(body: &str) -> String {
    format!("{SELECTOR_LIB}\n{body}")
}

fn decode<T: for<'de> Deserialize<'de>>(script: &str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| WebDriverError::Decode(format!("{script}: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub struct SelectorStatus {
    pub found: bool,
    pub visible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PageState {
    pub ready_state: String,
    pub href: String,
    pub inner_width: u32,
    pub inner_height: u32,
}

pub async fn enumerate_clickables(session: &BrowserSession) -> Result<Vec<ClickableDescriptor>> {
    let v = session
        .evaluate(&with_selector_lib(ENUMERATE_CLICKABLES), vec![])
        .await?;
    decode("enumerate_clickables", v)
}

/// Reports whether `selector` matches exactly one element. An ambiguous or
/// syntactically invalid selector is reported as not found.
pub async fn resolve_selector(session: &BrowserSession, selector: &str) -> Result<SelectorStatus> {
    let v = session
        .evaluate(&with_selector_lib(RESOLVE_SELECTOR), vec![json!(selector)])
        .await?;
    decode("resolve_selector", v)
}

/// Scrolls to the origin, overriding smooth scrolling. Returns the final offsets.
pub async fn scroll_top(session: &BrowserSession) -> Result<(f64, f64)> {
    let v = session.evaluate(SCROLL_TOP, vec![]).await?;
    decode("scroll_top", v)
}

pub async fn extract_text(session: &BrowserSession) -> Result<String> {
    let v = session.evaluate(EXTRACT_TEXT, vec![]).await?;
    decode("extract_text", v)
}

pub async fn extract_image_sources(session: &BrowserSession) -> Result<Vec<String>> {
    let v = session.evaluate(EXTRACT_IMAGE_SOURCES, vec![]).await?;
    decode("extract_image_sources", v)
}

pub async fn extract_link_targets(session: &BrowserSession) -> Result<Vec<String>> {
    let v = session.evaluate(EXTRACT_LINK_TARGETS, vec![]).await?;
    decode("extract_link_targets", v)
}

pub async fn extract_resource_urls(session: &BrowserSession) -> Result<Vec<String>> {
    let v = session.evaluate(EXTRACT_RESOURCE_URLS, vec![]).await?;
    decode("extract_resource_urls", v)
}

pub async fn page_state(session: &BrowserSession) -> Result<PageState> {
    let v = session.evaluate(PAGE_STATE, vec![]).await?;
    decode("page_state", v)
}

/// Mints a selector for the first element matching `css`, for harness use.
pub async fn mint_selector(session: &BrowserSession, css: &str) -> Result<Option<String>> {
    let body = format!("{SELECTOR_LIB}\nreturn cdMintSelector(document.querySelector(arguments[0]));");
    let v = session.evaluate(&body, vec![json!(css)]).await?;
    decode("mint_selector", v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_are_function_bodies() {
        for (name, body) in [
            ("enumerate", ENUMERATE_CLICKABLES),
            ("resolve", RESOLVE_SELECTOR),
            ("scroll", SCROLL_TOP),
            ("text", EXTRACT_TEXT),
            ("images", EXTRACT_IMAGE_SOURCES),
            ("links", EXTRACT_LINK_TARGETS),
            ("resources", EXTRACT_RESOURCE_URLS),
            ("state", PAGE_STATE),
        ] {
            assert!(body.contains("return"), "{name} never returns");
        }
        assert!(!SELECTOR_LIB.contains("return cdMintSelector"));
    }

    #[test]
    fn descriptors_decode_from_script_shape() {
        let v = json!([{ "selector": "#b1", "kind": "button", "visible": true }]);
        let d: Vec<ClickableDescriptor> = decode("t", v).unwrap();
        assert_eq!(d[0].selector, "#b1");
    }
}
