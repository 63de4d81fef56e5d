use std::collections::btree_map::{self, BTreeMap};

use serde::{Deserialize, Serialize};

/// A multiset of string tokens. Zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, u64>", into = "BTreeMap<String, u64>")]
pub struct FrequencyVector {
    counts: BTreeMap<String, u64>,
}

impl FrequencyVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: impl Into<String>, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(token.into()).or_insert(0) += count;
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Multiset cardinality, the sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Tokens in ascending order with their counts.
    pub fn iter(&self) -> btree_map::Iter<'_, String, u64> {
        self.counts.iter()
    }

    /// Multiset sum: counts of shared tokens are added.
    pub fn merge(&mut self, other: &FrequencyVector) {
        for (token, &count) in other.iter() {
            self.add(token.clone(), count);
        }
    }
}

impl From<BTreeMap<String, u64>> for FrequencyVector {
    fn from(mut counts: BTreeMap<String, u64>) -> Self {
        counts.retain(|_, count| *count > 0);
        FrequencyVector { counts }
    }
}

impl From<FrequencyVector> for BTreeMap<String, u64> {
    fn from(v: FrequencyVector) -> Self {
        v.counts
    }
}

impl<S: Into<String>> FromIterator<S> for FrequencyVector {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut v = FrequencyVector::new();
        for token in iter {
            v.add(token, 1);
        }
        v
    }
}

impl<'a> IntoIterator for &'a FrequencyVector {
    type Item = (&'a String, &'a u64);
    type IntoIter = btree_map::Iter<'a, String, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Word multiset of a text: split on runs of Unicode whitespace, case kept.
pub fn tokenize_text(text: &str) -> FrequencyVector {
    text.split_whitespace().collect()
}

/// Occurrence counts of a list of strings (image sources, link targets).
pub fn list_to_vector<S: AsRef<str>>(items: &[S]) -> FrequencyVector {
    items.iter().map(|s| s.as_ref()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vector(pairs: &[(&str, u64)]) -> FrequencyVector {
        let mut v = FrequencyVector::new();
        for (t, n) in pairs {
            v.add(*t, *n);
        }
        v
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize_text("a b a"), vector(&[("a", 2), ("b", 1)]));
        assert!(tokenize_text("").is_empty());
        assert_eq!(
            tokenize_text("Hello\n\thello"),
            vector(&[("Hello", 1), ("hello", 1)])
        );
        // U+3000 ideographic space and NBSP-free unicode whitespace both split
        assert_eq!(tokenize_text("x\u{3000}y\u{2029}x").count("x"), 2);
    }

    #[test]
    fn list_examples() {
        assert_eq!(list_to_vector(&["x", "x", "y"]), vector(&[("x", 2), ("y", 1)]));
        assert!(list_to_vector::<&str>(&[]).is_empty());
        assert_eq!(list_to_vector(&["b", "a", "b"]), list_to_vector(&["b", "b", "a"]));
    }

    #[test]
    fn zero_counts_are_not_stored() {
        let mut v = FrequencyVector::new();
        v.add("gone", 0);
        assert!(v.is_empty());
        let parsed: FrequencyVector = serde_json::from_str(r#"{"a":0,"b":3}"#).unwrap();
        assert_eq!(parsed, vector(&[("b", 3)]));
    }

    #[test]
    fn serializes_as_token_map() {
        let v = vector(&[("b", 1), ("a", 2)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":2,"b":1}"#);
    }

    proptest! {
        #[test]
        fn tokenize_concatenation_is_merge(a in "[a-c \\n\\t]{0,30}", b in "[a-c \\n]{0,30}") {
            let mut merged = tokenize_text(&a);
            merged.merge(&tokenize_text(&b));
            prop_assert_eq!(merged, tokenize_text(&format!("{a} {b}")));
        }

        #[test]
        fn list_vector_ignores_order(mut items in proptest::collection::vec("[a-d]{1,2}", 0..20), seed in any::<u64>()) {
            let before = list_to_vector(&items);
            let n = items.len();
            if n > 1 {
                items.swap(0, (seed as usize) % n);
                items.reverse();
            }
            prop_assert_eq!(before.total(), n as u64);
            prop_assert_eq!(before, list_to_vector(&items));
        }
    }
}
