mod common;

use std::time::Duration;

use cookiediff::clickstream::CountingHook;
use cookiediff::{
    generate_clickstream, open_session, resolve_domain, traverse_clickstream, ClickTiming,
};
use cookiediff_core::model::{CookiePolicy, FailureReason, StepStatus};
use cookiediff_core::ApexDomain;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::harness;

const TIMING: ClickTiming = ClickTiming {
    settle: Duration::from_millis(250),
    ready_budget: Duration::from_secs(10),
};

fn apex(name: &str) -> ApexDomain {
    ApexDomain::new(1, name).unwrap()
}

#[tokio::test]
async fn resolver_walks_candidates_in_order() {
    let h = harness().await;
    let port = h.server.primary_port();
    let s = open_session(&h.config, CookiePolicy::AllowAll, "resolve").await.unwrap();

    let only_www = resolve_domain(&apex("wwwonly.test"), &s, Some(port)).await.unwrap();
    assert!(only_www.succeeded);
    assert_eq!(only_www.url, format!("http://www.wwwonly.test:{}/", port));
    let failures: Vec<_> = only_www.attempts.iter().map(|a| a.failure).collect();
    assert_eq!(
        failures,
        [
            Some(FailureReason::TlsError),
            Some(FailureReason::TlsError),
            Some(FailureReason::NoClickables),
            None
        ]
    );

    let first = resolve_domain(&apex("static.test"), &s, Some(port)).await.unwrap();
    let again = resolve_domain(&apex("static.test"), &s, Some(port)).await.unwrap();
    assert_eq!(first, again);
    assert_eq!(first.url, format!("http://static.test:{}/", port));

    let gone = resolve_domain(&apex("nowhere.invalid"), &s, None).await.unwrap();
    assert!(!gone.succeeded);
    assert_eq!(gone.failure_reason, Some(FailureReason::NoResponse));
    assert_eq!(gone.attempts.len(), 4);
    s.close().await;
}

#[tokio::test]
async fn chain_reaches_full_length_and_cross_domain_ends_at_once() {
    let h = harness().await;
    let s = open_session(&h.config, CookiePolicy::AllowAll, "gen").await.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut hook = CountingHook::default();
    let chain = apex("chain.test");
    let url = h.at("chain.test", "/");
    let g = generate_clickstream(&s, &chain, &url, 5, 1, &mut rng, &mut hook, TIMING).await.unwrap();
    assert_eq!(g.clickstream.steps.len(), 5);
    assert_eq!(hook.steps, [0, 1, 2, 3, 4, 5]);
    assert!(g.outcomes.iter().all(|o| o.status == StepStatus::Clicked));
    assert!(g.outcomes[4].landed_url.ends_with("/chain/5"));

    let mut hook = CountingHook::default();
    let g = generate_clickstream(&s, &chain, &url, 0, 1, &mut rng, &mut hook, TIMING).await.unwrap();
    assert!(g.clickstream.steps.is_empty());
    assert_eq!(hook.steps, [0]);

    let mut hook = CountingHook::default();
    let away = apex("cross-domain.test");
    let url = h.at("cross-domain.test", "/");
    let g = generate_clickstream(&s, &away, &url, 5, 1, &mut rng, &mut hook, TIMING).await.unwrap();
    assert!(g.clickstream.steps.is_empty());
    assert_eq!(hook.steps, [0]);
    assert_eq!(g.outcomes.len(), 1);
    assert_eq!(g.outcomes[0].status, StepStatus::OffDomain);
    s.close().await;
}

#[tokio::test]
async fn static_replay_follows_the_generated_path() {
    let h = harness().await;
    let site = apex("static.test");
    let url = h.at("static.test", "/");
    let b = open_session(&h.config, CookiePolicy::AllowAll, "b").await.unwrap();
    let c = open_session(&h.config, CookiePolicy::AllowAll, "c").await.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = generate_clickstream(&b, &site, &url, 5, 9, &mut rng, &mut CountingHook::default(), TIMING)
        .await
        .unwrap();
    assert_eq!(g.clickstream.steps.len(), 5);

    let mut hook = CountingHook::default();
    let t = traverse_clickstream(&c, &site, &url, &g.clickstream, &mut hook, TIMING).await;
    assert!(t.error.is_none());
    assert_eq!(hook.steps, [0, 1, 2, 3, 4, 5]);
    let generated: Vec<&str> = g.outcomes.iter().map(|o| o.landed_url.as_str()).collect();
    let replayed: Vec<&str> = t.outcomes.iter().map(|o| o.landed_url.as_str()).collect();
    assert_eq!(generated, replayed);

    let mut hook = CountingHook::default();
    let mut empty = g.clickstream.clone();
    empty.steps.clear();
    let t = traverse_clickstream(&c, &site, &url, &empty, &mut hook, TIMING).await;
    assert!(t.outcomes.is_empty());
    assert_eq!(hook.steps, [0]);
    b.close().await;
    c.close().await;
}

#[tokio::test]
async fn rotated_away_selector_halts_traversal() {
    let h = harness().await;
    let site = apex("rotating.test");
    let url = h.at("rotating.test", "/");
    let s = open_session(&h.config, CookiePolicy::AllowAll, "rot").await.unwrap();
    s.navigate(&url).await.unwrap();
    let promo = cookiediff::scripts::enumerate_clickables(&s)
        .await
        .unwrap()
        .into_iter()
        .find(|d| d.selector.starts_with("#promo-"))
        .expect("promo link is clickable");
    let nav = cookiediff::scripts::enumerate_clickables(&s)
        .await
        .unwrap()
        .into_iter()
        .find(|d| d.selector.contains("nav"))
        .expect("nav link");

    let stream = cookiediff_core::model::Clickstream {
        domain: site.name.clone(),
        seed: 0,
        target_length: 3,
        steps: vec![nav.clone(), nav, promo],
    };
    let mut hook = CountingHook::default();
    let t = traverse_clickstream(&s, &site, &url, &stream, &mut hook, TIMING).await;
    let statuses: Vec<StepStatus> = t.outcomes.iter().map(|o| o.status).collect();
    assert_eq!(
        statuses,
        [StepStatus::Clicked, StepStatus::Clicked, StepStatus::SelectorUnresolved]
    );
    assert_eq!(hook.steps, [0, 1, 2]);
    s.close().await;
}
