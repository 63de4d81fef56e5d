//! Ranked apex-domain lists in the `rank,domain` one-pair-per-line format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A registered domain taken from a ranked list, e.g. `example.com`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApexDomain {
    pub rank: u32,
    pub name: String,
}

impl ApexDomain {
    /// Normalizes `name` to lowercase ASCII without a trailing dot. Returns
    /// `None` for a zero rank or anything that is not a dotted hostname.
    pub fn new(rank: u32, name: &str) -> Option<Self> {
        let name = name.trim().trim_end_matches('.').to_ascii_lowercase();
        if rank == 0 || !is_hostname(&name) || !name.contains('.') {
            return None;
        }
        Some(ApexDomain { rank, name })
    }

    /// True when `host` is this domain or one of its subdomains.
    pub fn covers_host(&self, host: &str) -> bool {
        let host = host.trim_end_matches('.').to_ascii_lowercase();
        host == self.name
            || host
                .strip_suffix(&self.name)
                .is_some_and(|prefix| prefix.ends_with('.'))
    }
}

impl std::fmt::Display for ApexDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}

fn is_hostname(name: &str) -> bool {
    !name.is_empty()
        && name.split('.').all(|label| {
            !label.is_empty()
                && label.len() <= 63
                && !label.starts_with('-')
                && !label.ends_with('-')
                && label
                    .bytes()
                    .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
        })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DomainList {
    pub domains: Vec<ApexDomain>,
    /// Non-blank lines that did not parse as `rank,domain`.
    pub malformed: usize,
}

pub fn parse_domain_list(text: &str, limit: Option<usize>) -> DomainList {
    let mut list = DomainList::default();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if limit.is_some_and(|limit| list.domains.len() >= limit) {
            break;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(rank, name)| ApexDomain::new(rank.trim().parse().ok()?, name));
        match parsed {
            Some(domain) => list.domains.push(domain),
            None => list.malformed += 1,
        }
    }
    list
}

pub fn load_domain_list(path: &Path, limit: Option<usize>) -> Result<DomainList> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_domain_list(&text, limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranked_pairs_in_order() {
        let list = parse_domain_list("1,google.com\n2,amazonaws.com", None);
        assert_eq!(
            list.domains,
            vec![
                ApexDomain { rank: 1, name: "google.com".into() },
                ApexDomain { rank: 2, name: "amazonaws.com".into() },
            ]
        );
        assert_eq!(list.malformed, 0);
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_domain_list("", None), DomainList::default());
    }

    #[test]
    fn malformed_lines_are_counted() {
        let list = parse_domain_list("x,not a rank\n3,ok.org\r\n# comment\n0,zero.com\n\n", None);
        assert_eq!(list.domains.len(), 1);
        assert_eq!(list.domains[0].name, "ok.org");
        assert_eq!(list.malformed, 3);
    }

    #[test]
    fn limit_truncates() {
        let list = parse_domain_list("1,a.com\n2,b.com\n3,c.com\n", Some(2));
        assert_eq!(list.domains.len(), 2);
    }

    #[test]
    fn normalizes_case_and_trailing_dot() {
        let d = ApexDomain::new(7, " Example.COM. ").unwrap();
        assert_eq!(d.name, "example.com");
        assert!(ApexDomain::new(1, "localhost").is_none());
        assert!(ApexDomain::new(1, "bad..com").is_none());
    }

    #[test]
    fn covers_subdomains_on_label_boundary() {
        let d = ApexDomain::new(1, "example.com").unwrap();
        assert!(d.covers_host("example.com"));
        assert!(d.covers_host("www.example.com"));
        assert!(d.covers_host("A.B.Example.com."));
        assert!(!d.covers_host("notexample.com"));
        assert!(!d.covers_host("example.com.evil.net"));
    }

    #[test]
    fn unreadable_file_is_an_error() {
        let err = load_domain_list(Path::new("/nonexistent/list.csv"), None).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
