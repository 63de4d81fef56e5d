use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::FrequencyVector;

/// The four frequency-vector features compared across groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Shingles,
    Words,
    ImageSrcs,
    Links,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] = [
        FeatureKind::Shingles,
        FeatureKind::Words,
        FeatureKind::ImageSrcs,
        FeatureKind::Links,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Shingles => "shingles",
            FeatureKind::Words => "words",
            FeatureKind::ImageSrcs => "image_srcs",
            FeatureKind::Links => "links",
        }
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Multiset intersection and union sizes, `Σ min` and `Σ max` over tokens.
fn overlap(a: &FrequencyVector, b: &FrequencyVector) -> (u64, u64) {
    let (mut inter, mut union) = (0, 0);
    let mut left = a.iter().peekable();
    let mut right = b.iter().peekable();
    loop {
        match (left.peek(), right.peek()) {
            (Some((ta, &na)), Some((tb, &nb))) => match ta.cmp(tb) {
                Ordering::Less => {
                    union += na;
                    left.next();
                }
                Ordering::Greater => {
                    union += nb;
                    right.next();
                }
                Ordering::Equal => {
                    inter += na.min(nb);
                    union += na.max(nb);
                    left.next();
                    right.next();
                }
            },
            (Some((_, &n)), None) => {
                union += n;
                left.next();
            }
            (None, Some((_, &n))) => {
                union += n;
                right.next();
            }
            (None, None) => return (inter, union),
        }
    }
}

/// Multiset Jaccard distance in `[0, 1]`; two empty vectors are identical.
pub fn jaccard_distance(a: &FrequencyVector, b: &FrequencyVector) -> f64 {
    let (inter, union) = overlap(a, b);
    if union == 0 {
        return 0.0;
    }
    1.0 - inter as f64 / union as f64
}

/// Difference in distance, `J(baseline, experimental) − J(baseline, control)`.
pub fn did(baseline: &FrequencyVector, control: &FrequencyVector, experimental: &FrequencyVector) -> f64 {
    jaccard_distance(baseline, experimental) - jaccard_distance(baseline, control)
}
