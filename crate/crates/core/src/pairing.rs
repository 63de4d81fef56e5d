//! Aligning capture points across the three groups and reducing a domain's
//! record to per-step metrics.

use std::collections::BTreeSet;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::bce::{bce_screenshot_difference, BceOutcome, SkipReason};
use crate::model::{CaptureRecord, DomainRecord, Group, TerminationStatus};
use crate::raster::Raster;
use crate::{count_ad_requests, did, AdDomains, FeatureKind};

/// A capture point: clickstream (round) index and step index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CaptureKey {
    pub round: usize,
    pub step: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct CaptureTriple<'a> {
    pub key: CaptureKey,
    /// Length of the clickstream this point belongs to.
    pub clickstream_length: usize,
    pub baseline: &'a CaptureRecord,
    pub control: &'a CaptureRecord,
    pub experimental: &'a CaptureRecord,
}

#[derive(Clone, Debug, Default)]
pub struct Pairing<'a> {
    pub triples: Vec<CaptureTriple<'a>>,
    /// Capture points present in some group but not complete in all three.
    pub dropped: usize,
}

pub fn pair_capture_points(record: &DomainRecord) -> Pairing<'_> {
    let mut pairing = Pairing::default();
    for round in &record.rounds {
        let find = |group: Group, step: usize| {
            round
                .group(group)?
                .captures
                .iter()
                .find(|c| c.step_index == step && c.is_complete())
        };
        let steps: BTreeSet<usize> = round
            .groups
            .iter()
            .flat_map(|g| g.captures.iter().map(|c| c.step_index))
            .collect();
        for step in steps {
            match (
                find(Group::Baseline, step),
                find(Group::Control, step),
                find(Group::Experimental, step),
            ) {
                (Some(baseline), Some(control), Some(experimental)) => {
                    pairing.triples.push(CaptureTriple {
                        key: CaptureKey {
                            round: round.index,
                            step,
                        },
                        clickstream_length: round.clickstream.steps.len(),
                        baseline,
                        control,
                        experimental,
                    })
                }
                _ => pairing.dropped += 1,
            }
        }
    }
    pairing
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DidValue {
    pub feature: FeatureKind,
    pub value: f64,
    pub key: CaptureKey,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub key: CaptureKey,
    pub clickstream_length: usize,
    pub bce: BceOutcome,
    pub did: Vec<DidValue>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub baseline: usize,
    pub control: usize,
    pub experimental: usize,
}

impl GroupCounts {
    fn slot(&mut self, group: Group) -> &mut usize {
        match group {
            Group::Baseline => &mut self.baseline,
            Group::Control => &mut self.control,
            Group::Experimental => &mut self.experimental,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub domain: String,
    pub rank: u32,
    pub status: TerminationStatus,
    pub steps: Vec<StepSummary>,
    pub dropped: usize,
    /// Triples whose screenshots could not be loaded.
    pub unreadable: usize,
    pub skipped_dimension_mismatch: usize,
    pub skipped_no_stable_chunks: usize,
    pub mean_delta: Option<f64>,
    pub median_delta: Option<f64>,
    /// No capture point survived pairing.
    pub no_common_points: bool,
    /// Every paired point was skipped; excluded from BCE distributions.
    pub skipped: bool,
    pub clickstream_lengths: Vec<usize>,
    /// Requests to listed ad domains, summed over each group's captures.
    pub ad_requests: GroupCounts,
}

impl DomainSummary {
    pub fn deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().filter_map(|s| s.bce.delta())
    }

    pub fn did_values(&self, feature: FeatureKind) -> impl Iterator<Item = &DidValue> + '_ {
        self.steps
            .iter()
            .flat_map(|s| &s.did)
            .filter(move |d| d.feature == feature)
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Reduces one domain's record. `load_screenshot` reads the PNG behind a
/// capture; triples whose screenshots fail to load are counted as unreadable.
pub fn summarize_domain<E>(
    record: &DomainRecord,
    ads: &AdDomains,
    chunk_px: NonZeroU32,
    mut load_screenshot: impl FnMut(&CaptureRecord) -> Result<Raster, E>,
) -> DomainSummary {
    let pairing = pair_capture_points(record);
    let mut steps = Vec::with_capacity(pairing.triples.len());
    let mut unreadable = 0;
    for triple in &pairing.triples {
        let images = (
            load_screenshot(triple.baseline),
            load_screenshot(triple.control),
            load_screenshot(triple.experimental),
        );
        let (Ok(b), Ok(c), Ok(e)) = images else {
            unreadable += 1;
            continue;
        };
        let did = FeatureKind::ALL
            .iter()
            .map(|&feature| DidValue {
                feature,
                value: did(
                    triple.baseline.vector(feature),
                    triple.control.vector(feature),
                    triple.experimental.vector(feature),
                ),
                key: triple.key,
            })
            .collect();
        steps.push(StepSummary {
            key: triple.key,
            clickstream_length: triple.clickstream_length,
            bce: bce_screenshot_difference(&b, &c, &e, chunk_px),
            did,
        });
    }

    let mut deltas: Vec<f64> = steps.iter().filter_map(|s| s.bce.delta()).collect();
    let skipped_with = |reason| {
        steps
            .iter()
            .filter(|s| s.bce.skip_reason() == Some(reason))
            .count()
    };
    let mut ad_requests = GroupCounts::default();
    for round in &record.rounds {
        for run in &round.groups {
            let slot = ad_requests.slot(run.group);
            for capture in run.captures.iter().filter(|c| c.is_complete()) {
                *slot += count_ad_requests(&capture.resource_urls, ads);
            }
        }
    }

    DomainSummary {
        domain: record.apex.name.clone(),
        rank: record.apex.rank,
        status: record.status,
        dropped: pairing.dropped,
        unreadable,
        skipped_dimension_mismatch: skipped_with(SkipReason::DimensionMismatch),
        skipped_no_stable_chunks: skipped_with(SkipReason::NoStableChunks),
        mean_delta: (!deltas.is_empty()).then(|| deltas.iter().sum::<f64>() / deltas.len() as f64),
        median_delta: median(&mut deltas),
        no_common_points: steps.is_empty(),
        skipped: !steps.is_empty() && deltas.is_empty(),
        clickstream_lengths: record.rounds.iter().map(|r| r.clickstream.steps.len()).collect(),
        ad_requests,
        steps,
    }
}
