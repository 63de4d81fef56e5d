mod common;

use std::time::{Duration, Instant};

use cookiediff::webdriver::WebDriverError;
use cookiediff::{open_session, scripts, BrowserConfig, LoadOutcome};
use cookiediff_core::model::CookiePolicy;
use serde_json::json;

use common::harness;

#[tokio::test]
async fn evaluate_returns_values_and_survives_exceptions() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "eval").await.unwrap();
    assert_eq!(s.evaluate("return 1+1", vec![]).await.unwrap(), json!(2));
    assert_eq!(
        s.evaluate("return [arguments[0], {a: 'b'}]", vec![json!("x")]).await.unwrap(),
        json!(["x", {"a": "b"}])
    );
    match s.evaluate("throw new Error('kaboom')", vec![]).await {
        Err(WebDriverError::Script(msg)) => assert!(msg.contains("kaboom"), "{msg}"),
        other => panic!("expected script error, got {other:?}"),
    }
    assert_eq!(s.evaluate("return 'still here'", vec![]).await.unwrap(), json!("still here"));
    s.close().await;
}

#[tokio::test]
async fn static_page_screenshots_are_viewport_sized_and_stable() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "shot").await.unwrap();
    let outcome = s.navigate(&h.server.url("/static/")).await.unwrap();
    assert_eq!(outcome, LoadOutcome::Complete);
    let state = scripts::page_state(&s).await.unwrap();
    assert_eq!((state.inner_width, state.inner_height), (1366, 768));
    let a = s.screenshot_viewport().await.unwrap();
    let b = s.screenshot_viewport().await.unwrap();
    assert_eq!(a.dimensions(), (1366, 768));
    assert_eq!(a.as_bytes(), b.as_bytes());
    assert!(a.as_bytes().chunks(4).any(|p| p != [255, 255, 255, 255]), "page rendered blank");
    s.close().await;
}

#[tokio::test]
async fn slow_page_times_out_without_killing_the_session() {
    let h = harness().await;
    let config = BrowserConfig {
        page_timeout: Duration::from_secs(2),
        ..h.config.clone()
    };
    let s = open_session(&config, CookiePolicy::AllowAll, "slow").await.unwrap();
    let started = Instant::now();
    let outcome = s.navigate(&h.server.url("/slow?slow_delay_ms=30000")).await.unwrap();
    assert_eq!(outcome, LoadOutcome::Timeout);
    assert!(started.elapsed() < Duration::from_secs(20));
    assert_eq!(s.navigate(&h.server.url("/static/")).await.unwrap(), LoadOutcome::Complete);
    s.close().await;
}

#[tokio::test]
async fn unreachable_origin_is_a_navigation_error() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "nav").await.unwrap();
    match s.navigate("http://nowhere.invalid/").await {
        Err(WebDriverError::Navigation(msg)) => assert!(msg.contains("ERR_NAME_NOT_RESOLVED"), "{msg}"),
        other => panic!("expected navigation error, got {other:?}"),
    }
    s.close().await;
}

#[tokio::test]
async fn closed_sessions_report_dead_and_close_is_idempotent() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "close").await.unwrap();
    s.close().await;
    s.close().await;
    let err = s.navigate(&h.server.url("/static/")).await.unwrap_err();
    assert!(err.is_session_dead(), "{err:?}");
}

#[tokio::test]
async fn close_during_navigation_aborts_it() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "abort").await.unwrap();
    let url = h.server.url("/slow?slow_delay_ms=8000");
    let (nav, ()) = tokio::join!(s.navigate(&url), async {
        tokio::time::sleep(Duration::from_millis(500)).await;
        s.close().await;
    });
    assert!(nav.is_err(), "navigation after close should fail, got {nav:?}");
    assert!(s.is_closed());
}

#[tokio::test]
async fn third_party_cookie_follows_policy() {
    let h = harness().await;
    let url = h.at("cookie-gated.test", "/cookie-gated/");
    for (policy, expected) in [(CookiePolicy::AllowAll, true), (CookiePolicy::BlockThirdParty, false)] {
        let s = open_session(&h.config, policy, "tp").await.unwrap();
        s.navigate(&url).await.unwrap();
        let mut seen = serde_json::Value::Null;
        for _ in 0..50 {
            seen = s.evaluate("return window.__tpCookie", vec![]).await.unwrap();
            if !seen.is_null() {
                break;
            }
            tokio::time::sleep(Duration::from_millis(100)).await;
        }
        assert_eq!(seen, json!(expected), "{policy:?}");
        s.close().await;
    }
}

async fn cookie_echo(s: &cookiediff::BrowserSession, url: &str) -> String {
    s.navigate(url).await.unwrap();
    s.evaluate("return document.getElementById('sent').textContent", vec![])
        .await
        .unwrap()
        .as_str()
        .unwrap()
        .to_string()
}

#[tokio::test]
async fn profiles_are_isolated_and_first_party_cookies_persist() {
    let h = harness().await;
    let set = h.at("static.test", "/cookies/set?name=sentinel&value=42");
    let echo = h.at("static.test", "/cookies/echo");
    let a = open_session(&h.config, CookiePolicy::BlockThirdParty, "a").await.unwrap();
    let b = open_session(&h.config, CookiePolicy::AllowAll, "b").await.unwrap();
    assert_ne!(a.profile_tag(), b.profile_tag());
    a.navigate(&set).await.unwrap();
    assert!(cookie_echo(&a, &echo).await.contains("sentinel=42"));
    assert!(!cookie_echo(&b, &echo).await.contains("sentinel"));
    b.close().await;
    let c = open_session(&h.config, CookiePolicy::AllowAll, "c").await.unwrap();
    assert!(!cookie_echo(&c, &echo).await.contains("sentinel"));
    a.close().await;
    c.close().await;
}
