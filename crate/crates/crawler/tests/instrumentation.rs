mod common;

use cookiediff::{open_session, scripts, BrowserSession};
use cookiediff_core::model::{ClickableKind, CookiePolicy};
use serde_json::json;

use common::harness;

async fn author(s: &BrowserSession, html: &str) {
    s.evaluate("document.body.innerHTML = arguments[0]", vec![json!(html)])
        .await
        .unwrap();
}

#[tokio::test]
async fn clickables_are_classified_with_unique_selectors() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "click").await.unwrap();
    s.navigate(&h.server.url("/clickables")).await.unwrap();
    let found = scripts::enumerate_clickables(&s).await.unwrap();
    let kinds: Vec<ClickableKind> = found.iter().map(|d| d.kind).collect();
    use ClickableKind::*;
    assert_eq!(kinds, [Button, Button, Link, Link, Link, Onclick]);
    assert_eq!(found[0].selector, "#b1");
    for d in &found {
        let status = scripts::resolve_selector(&s, &d.selector).await.unwrap();
        assert!(status.found && status.visible, "{d:?}");
    }
    let selectors: Vec<&str> = found.iter().map(|d| d.selector.as_str()).collect();
    assert_eq!(
        selectors,
        ["#b1", "button:nth-child(2)", "li:nth-child(1) > a", "li:nth-child(2) > a", "li:nth-child(3) > a", "div"]
    );

    // stable across a reload of the unchanged page
    s.navigate(&h.server.url("/clickables")).await.unwrap();
    assert_eq!(scripts::enumerate_clickables(&s).await.unwrap(), found);
    s.close().await;
}

#[tokio::test]
async fn priority_and_pointer_cursor() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "prio").await.unwrap();
    s.navigate(&h.server.url("/blank")).await.unwrap();
    author(
        &s,
        "<a id=\"l\" style=\"cursor:pointer\" onclick=\"1\">l</a>\
<span id=\"p\" style=\"cursor:pointer\">p</span>\
<div id=\"o\" onclick=\"1\" style=\"cursor:pointer\">o</div>\
<button id=\"b\" onclick=\"1\">b</button><div id=\"h\" style=\"display:none\"><a>hidden</a></div>",
    )
    .await;
    let found = scripts::enumerate_clickables(&s).await.unwrap();
    let summary: Vec<(&str, ClickableKind, bool)> = found
        .iter()
        .map(|d| (d.selector.as_str(), d.kind, d.visible))
        .collect();
    assert_eq!(
        summary,
        [
            ("#l", ClickableKind::Link, true),
            ("#p", ClickableKind::Pointer, true),
            ("#o", ClickableKind::Onclick, true),
            ("#b", ClickableKind::Button, true),
            ("#h > a", ClickableKind::Link, false),
        ]
    );

    author(&s, "").await;
    assert!(scripts::enumerate_clickables(&s).await.unwrap().is_empty());
    s.close().await;
}

#[tokio::test]
async fn minted_selectors_round_trip_and_ambiguity_is_not_found() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "sel").await.unwrap();
    s.navigate(&h.server.url("/static/")).await.unwrap();
    let found = scripts::enumerate_clickables(&s).await.unwrap();
    assert!(found.len() >= 6);
    s.navigate(&h.server.url("/static/")).await.unwrap();
    for d in &found {
        assert!(scripts::resolve_selector(&s, &d.selector).await.unwrap().found, "{d:?}");
    }

    s.navigate(&h.server.url("/clickables")).await.unwrap();
    let second = scripts::mint_selector(&s, "#m li:nth-child(2)").await.unwrap().unwrap();
    let count = s
        .evaluate("return document.querySelectorAll(arguments[0]).length", vec![json!(second)])
        .await
        .unwrap();
    assert_eq!(count, json!(1), "{second}");

    for sel in ["button", "li", "div[", "#does-not-exist"] {
        assert!(!scripts::resolve_selector(&s, sel).await.unwrap().found, "{sel}");
    }
    s.close().await;
}

#[tokio::test]
async fn scroll_top_is_instant_on_smooth_pages() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "scroll").await.unwrap();
    s.navigate(&h.server.url("/tall")).await.unwrap();
    s.evaluate("document.documentElement.style.scrollBehavior='auto'; window.scrollTo(0, 3000); document.documentElement.style.scrollBehavior=''", vec![])
        .await
        .unwrap();
    let y = s.evaluate("return window.scrollY", vec![]).await.unwrap();
    assert!(y.as_f64().unwrap() > 1000.0);
    assert_eq!(scripts::scroll_top(&s).await.unwrap(), (0.0, 0.0));
    assert_eq!(scripts::scroll_top(&s).await.unwrap(), (0.0, 0.0));
    s.close().await;
}

#[tokio::test]
async fn content_extraction() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "extract").await.unwrap();
    s.navigate(&h.server.url("/images")).await.unwrap();
    let srcs = scripts::extract_image_sources(&s).await.unwrap();
    let remote = format!("{}/assets/img/remote.png", h.server.secondary_origin());
    assert_eq!(
        srcs,
        ["/assets/img/tile-0.png", "/assets/img/tile-0.png", "/assets/img/tile-1.png", remote.as_str()]
    );
    assert_eq!(scripts::extract_link_targets(&s).await.unwrap(), ["/static/"]);
    let resources = scripts::extract_resource_urls(&s).await.unwrap();
    for needle in ["/assets/img/tile-0.png", "/assets/img/tile-1.png", "/assets/app.js", "remote.png"] {
        assert!(resources.iter().any(|r| r.ends_with(needle)), "{needle} missing from {resources:?}");
    }

    s.navigate(&h.server.url("/blank")).await.unwrap();
    author(&s, "<p>hello world</p><div style=\"display:none\">secret</div>").await;
    assert_eq!(scripts::extract_text(&s).await.unwrap(), "hello world");
    s.evaluate("document.body.remove()", vec![]).await.unwrap();
    assert_eq!(scripts::extract_text(&s).await.unwrap(), "");
    assert!(scripts::extract_image_sources(&s).await.unwrap().is_empty());
    s.close().await;
}
