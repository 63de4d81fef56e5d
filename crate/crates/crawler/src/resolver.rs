//! Turns an apex domain into a landing URL by trying scheme and `www.`
//! permutations in a fixed order.

use cookiediff_core::model::{FailureReason, ResolutionAttempt, ResolvedTarget};
use cookiediff_core::ApexDomain;

use crate::scripts;
use crate::webdriver::{BrowserSession, LoadOutcome, Result, WebDriverError};

/// The four candidates, in the order they are tried. `port` is appended to
/// every candidate when set, which lets hermetic runs point at a local server.
pub fn candidate_urls(apex: &ApexDomain, port: Option<u16>) -> [String; 4] {
    let port = port.map(|p| format!(":{p}")).unwrap_or_default();
    let name = &apex.name;
    [
        format!("https://{name}{port}/"),
        format!("https://www.{name}{port}/"),
        format!("http://{name}{port}/"),
        format!("http://www.{name}{port}/"),
    ]
}

fn classify_navigation_error(message: &str) -> FailureReason {
    let upper = message.to_ascii_uppercase();
    if upper.contains("SSL") || upper.contains("CERT") || upper.contains("NSSFAILURE") {
        FailureReason::TlsError
    } else if upper.contains("TIMED_OUT") || upper.contains("TIMEOUT") {
        FailureReason::Timeout
    } else {
        FailureReason::NoResponse
    }
}

async fn try_candidate(session: &BrowserSession, url: &str) -> Result<Option<FailureReason>> {
    match session.navigate(url).await {
        Ok(LoadOutcome::Complete) => {}
        Ok(LoadOutcome::Timeout) => return Ok(Some(FailureReason::Timeout)),
        Err(WebDriverError::Navigation(msg)) => return Ok(Some(classify_navigation_error(&msg))),
        Err(WebDriverError::Timeout(_)) => return Ok(Some(FailureReason::Timeout)),
        Err(e) if e.is_session_dead() => return Err(e),
        Err(e) => {
            tracing::debug!(%url, error = %e, "candidate failed");
            return Ok(Some(FailureReason::NoResponse));
        }
    }
    match scripts::enumerate_clickables(session).await {
        Ok(found) if !found.is_empty() => Ok(None),
        Ok(_) => Ok(Some(FailureReason::NoClickables)),
        Err(e) if e.is_session_dead() => Err(e),
        Err(_) => Ok(Some(FailureReason::NoClickables)),
    }
}

/// Tries each candidate in turn and accepts the first page that loads and
/// has at least one clickable element. Only a dead session is an error.
pub async fn resolve_domain(
    apex: &ApexDomain,
    session: &BrowserSession,
    port: Option<u16>,
) -> Result<ResolvedTarget> {
    let mut attempts = Vec::with_capacity(4);
    for url in candidate_urls(apex, port) {
        let failure = try_candidate(session, &url).await?;
        attempts.push(ResolutionAttempt {
            url: url.clone(),
            failure,
        });
        if failure.is_none() {
            return Ok(ResolvedTarget {
                apex: apex.clone(),
                url,
                succeeded: true,
                failure_reason: None,
                attempts,
            });
        }
    }
    Ok(ResolvedTarget {
        apex: apex.clone(),
        url: attempts.last().map(|a| a.url.clone()).unwrap_or_default(),
        succeeded: false,
        failure_reason: attempts.last().and_then(|a| a.failure),
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_in_fixed_order() {
        let apex = ApexDomain::new(1, "example.com").unwrap();
        assert_eq!(
            candidate_urls(&apex, None),
            [
                "https://example.com/",
                "https://www.example.com/",
                "http://example.com/",
                "http://www.example.com/",
            ]
        );
        assert_eq!(candidate_urls(&apex, Some(8080))[3], "http://www.example.com:8080/");
    }

    #[test]
    fn navigation_errors_are_classified() {
        assert_eq!(
            classify_navigation_error("unknown error: net::ERR_SSL_PROTOCOL_ERROR"),
            FailureReason::TlsError
        );
        assert_eq!(
            classify_navigation_error("net::ERR_CERT_AUTHORITY_INVALID"),
            FailureReason::TlsError
        );
        assert_eq!(
            classify_navigation_error("net::ERR_CONNECTION_TIMED_OUT"),
            FailureReason::Timeout
        );
        assert_eq!(
            classify_navigation_error("net::ERR_NAME_NOT_RESOLVED"),
            FailureReason::NoResponse
        );
    }
}
