//! Counting requests to listed advertising domains.

use std::collections::HashSet;
use std::path::Path;

use url::Url;

use crate::{Error, Result};

/// A set of advertising domains matched on label boundaries.
#[derive(Clone, Debug, Default)]
pub struct AdDomains {
    domains: HashSet<String>,
}

impl AdDomains {
    /// Parses one domain per line. Blank lines and `!`/`#` comments are
    /// ignored; EasyList-style `||domain^` rules are reduced to their domain.
    pub fn parse(text: &str) -> Self {
        let domains = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('!') && !l.starts_with('#'))
            .filter_map(|l| {
                let l = l.strip_prefix("||").unwrap_or(l);
                let l = l.split(['^', '/', '$']).next()?;
                let l = l.trim_end_matches('.').to_ascii_lowercase();
                (!l.is_empty() && !l.contains(['*', ' '])).then_some(l)
            })
            .collect();
        AdDomains { domains }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    /// True when `host` or any parent domain of it is listed.
    pub fn matches_host(&self, host: &str) -> bool {
        let host = host.trim_end_matches('.').to_ascii_lowercase();
        let mut rest = host.as_str();
        loop {
            if self.domains.contains(rest) {
                return true;
            }
            match rest.split_once('.') {
                Some((_, parent)) => rest = parent,
                None => return false,
            }
        }
    }
}

impl<S: Into<String>> FromIterator<S> for AdDomains {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        AdDomains {
            domains: iter.into_iter().map(|d| d.into().to_ascii_lowercase()).collect(),
        }
    }
}

/// Number of URLs whose host is a listed domain or a subdomain of one.
/// Unparseable URLs and URLs without a host are not counted.
pub fn count_ad_requests<S: AsRef<str>>(resource_urls: &[S], ads: &AdDomains) -> usize {
    resource_urls
        .iter()
        .filter_map(|u| Url::parse(u.as_ref()).ok())
        .filter(|u| u.host_str().is_some_and(|h| ads.matches_host(h)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ads(list: &[&str]) -> AdDomains {
        list.iter().copied().collect()
    }

    #[test]
    fn subdomain_matches() {
        assert_eq!(count_ad_requests(&["https://ads.x.com/p"], &ads(&["x.com"])), 1);
    }

    #[test]
    fn empty_list_is_zero() {
        assert_eq!(count_ad_requests::<&str>(&[], &ads(&["x.com"])), 0);
    }

    #[test]
    fn label_boundary_only() {
        assert_eq!(count_ad_requests(&["https://notx.com/a"], &ads(&["x.com"])), 0);
        assert_eq!(count_ad_requests(&["https://x.com.evil.org/a"], &ads(&["x.com"])), 0);
    }

    #[test]
    fn duplicates_and_junk() {
        let urls = [
            "https://x.com/a",
            "https://x.com/a",
            "http://cdn.y.net:8080/z.js",
            "not a url",
            "data:image/png;base64,AAAA",
        ];
        assert_eq!(count_ad_requests(&urls, &ads(&["x.com", "y.net"])), 3);
    }

    #[test]
    fn parses_domain_files_and_easylist_rules() {
        let set = AdDomains::parse("! comment\n# also\n\nDoubleClick.net\n||adnxs.com^\n||ads.example.org^$third-party\n");
        assert_eq!(set.len(), 3);
        assert!(set.matches_host("stats.g.doubleclick.net"));
        assert!(set.matches_host("adnxs.com"));
        assert!(set.matches_host("ads.example.org"));
        assert!(!set.matches_host("example.org"));
    }
}
