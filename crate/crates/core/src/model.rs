//! Persisted crawl records.

use serde::{Deserialize, Serialize};

use crate::raster::Raster;
use crate::{ApexDomain, FeatureKind, FrequencyVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CookiePolicy {
    AllowAll,
    BlockThirdParty,
}

/// The three crawl groups, in the order they run within a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Baseline,
    Control,
    Experimental,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Baseline, Group::Control, Group::Experimental];

    pub fn policy(self) -> CookiePolicy {
        match self {
            Group::Baseline | Group::Control => CookiePolicy::AllowAll,
            Group::Experimental => CookiePolicy::BlockThirdParty,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Baseline => "baseline",
            Group::Control => "control",
            Group::Experimental => "experimental",
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickableKind {
    Button,
    Link,
    Onclick,
    Pointer,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClickableDescriptor {
    pub selector: String,
    pub kind: ClickableKind,
    #[serde(default)]
    pub visible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clickstream {
    pub domain: String,
    pub seed: u64,
    pub target_length: usize,
    pub steps: Vec<ClickableDescriptor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Clicked,
    SelectorUnresolved,
    ClickFailed,
    OffDomain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub index: usize,
    pub status: StepStatus,
    pub landed_url: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NoResponse,
    NoClickables,
    TlsError,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionAttempt {
    pub url: String,
    /// `None` when this candidate was accepted.
    pub failure: Option<FailureReason>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedTarget {
    pub apex: ApexDomain,
    pub url: String,
    pub succeeded: bool,
    pub failure_reason: Option<FailureReason>,
    #[serde(default)]
    pub attempts: Vec<ResolutionAttempt>,
}

/// Everything captured at one point of a traversal: the landing page
/// (`step_index` 0) or the page after step `i` (`step_index` i).
#[derive(Clone, Debug)]
pub struct FeatureSet {
    pub step_index: usize,
    pub screenshot: Raster,
    pub shingles: FrequencyVector,
    pub words: FrequencyVector,
    pub image_srcs: FrequencyVector,
    pub links: FrequencyVector,
    pub resource_urls: Vec<String>,
    pub captured_at_ms: u64,
}

/// A [`FeatureSet`] as stored: the screenshot lives in a separate PNG file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub step_index: usize,
    /// PNG path relative to the domain directory; `None` if the capture failed.
    pub screenshot: Option<String>,
    pub width: u32,
    pub height: u32,
    pub shingles: FrequencyVector,
    pub words: FrequencyVector,
    pub image_srcs: FrequencyVector,
    pub links: FrequencyVector,
    pub resource_urls: Vec<String>,
    pub captured_at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaptureRecord {
    pub fn from_feature_set(features: &FeatureSet, screenshot_path: impl Into<String>) -> Self {
        CaptureRecord {
            step_index: features.step_index,
            screenshot: Some(screenshot_path.into()),
            width: features.screenshot.width(),
            height: features.screenshot.height(),
            shingles: features.shingles.clone(),
            words: features.words.clone(),
            image_srcs: features.image_srcs.clone(),
            links: features.links.clone(),
            resource_urls: features.resource_urls.clone(),
            captured_at_ms: features.captured_at_ms,
            error: None,
        }
    }

    pub fn failed(step_index: usize, captured_at_ms: u64, error: impl Into<String>) -> Self {
        CaptureRecord {
            step_index,
            screenshot: None,
            width: 0,
            height: 0,
            shingles: FrequencyVector::new(),
            words: FrequencyVector::new(),
            image_srcs: FrequencyVector::new(),
            links: FrequencyVector::new(),
            resource_urls: Vec::new(),
            captured_at_ms,
            error: Some(error.into()),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none() && self.screenshot.is_some()
    }

    pub fn vector(&self, kind: FeatureKind) -> &FrequencyVector {
        match kind {
            FeatureKind::Shingles => &self.shingles,
            FeatureKind::Words => &self.words,
            FeatureKind::ImageSrcs => &self.image_srcs,
            FeatureKind::Links => &self.links,
        }
    }
}

/// One group's pass over a round's clickstream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRun {
    pub group: Group,
    pub policy: CookiePolicy,
    pub profile_tag: String,
    pub outcomes: Vec<StepOutcome>,
    pub captures: Vec<CaptureRecord>,
    pub started_at_ms: u64,
    pub finished_at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl GroupRun {
    pub fn complete_captures(&self) -> usize {
        self.captures.iter().filter(|c| c.is_complete()).count()
    }
}

/// One clickstream: generated by the baseline group, then replayed by control
/// and experimental.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub index: usize,
    pub clickstream: Clickstream,
    pub groups: Vec<GroupRun>,
}

impl Round {
    pub fn group(&self, group: Group) -> Option<&GroupRun> {
        self.groups.iter().find(|g| g.group == group)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationStatus {
    /// Written while rounds are still running; a record left in this state was
    /// interrupted and will be crawled again on resume.
    InProgress,
    Complete,
    Timeout,
    ResolutionFailed,
    Crashed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub apex: ApexDomain,
    pub resolution: Option<ResolvedTarget>,
    pub rounds: Vec<Round>,
    pub status: TerminationStatus,
    pub started_at_ms: u64,
    pub finished_at_ms: u64,
    #[serde(default)]
    pub retries: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DomainRecord {
    pub fn new(apex: ApexDomain, started_at_ms: u64) -> Self {
        DomainRecord {
            apex,
            resolution: None,
            rounds: Vec::new(),
            status: TerminationStatus::InProgress,
            started_at_ms,
            finished_at_ms: started_at_ms,
            retries: 0,
            error: None,
        }
    }

    /// Complete capture points collected so far by `group`.
    pub fn captures_for(&self, group: Group) -> usize {
        self.rounds
            .iter()
            .filter_map(|r| r.group(group))
            .map(GroupRun::complete_captures)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_policies() {
        assert_eq!(Group::Baseline.policy(), CookiePolicy::AllowAll);
        assert_eq!(Group::Control.policy(), CookiePolicy::AllowAll);
        assert_eq!(Group::Experimental.policy(), CookiePolicy::BlockThirdParty);
    }

    #[test]
    fn failed_capture_is_incomplete() {
        let c = CaptureRecord::failed(2, 0, "screenshot failed");
        assert!(!c.is_complete());
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["error"], "screenshot failed");
        let back: CaptureRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn enums_use_snake_case() {
        assert_eq!(serde_json::to_string(&StepStatus::SelectorUnresolved).unwrap(), "\"selector_unresolved\"");
        assert_eq!(serde_json::to_string(&CookiePolicy::BlockThirdParty).unwrap(), "\"block_third_party\"");
        assert_eq!(serde_json::to_string(&TerminationStatus::ResolutionFailed).unwrap(), "\"resolution_failed\"");
    }
}
