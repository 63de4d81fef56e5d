//! Turns a crawl store into summaries, CDF tables and the ad-request table.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::num::NonZeroU32;
use std::path::{Path, PathBuf};

use cookiediff_core::cdf::write_cdf;
use cookiediff_core::model::TerminationStatus;
use cookiediff_core::pairing::{summarize_domain, DomainSummary};
use cookiediff_core::{AdDomains, FeatureKind};
use serde::Serialize;

use crate::store::{Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cookiediff_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AnalyzeError + '_ {
    move |source| AnalyzeError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Totals written to `report.json`. Contains nothing time dependent, so
/// analyzing an unchanged store twice gives identical output.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub domains: usize,
    pub statuses: BTreeMap<String, usize>,
    /// Domains with at least one scored capture point.
    pub scored_domains: usize,
    pub capture_points: usize,
    pub scored_points: usize,
    pub skipped_domains: usize,
    pub no_common_points: usize,
    pub skipped_dimension_mismatch: usize,
    pub skipped_no_stable_chunks: usize,
    pub dropped_points: usize,
    pub unreadable_points: usize,
    pub mean_of_domain_means: Option<f64>,
    pub clickstream_lengths: BTreeMap<usize, usize>,
    pub ad_domains: usize,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn status_key(status: TerminationStatus) -> String {
    serde_json::to_value(status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Summarizes every record of `store` into `out`:
///
/// * `summaries.jsonl`, one domain summary per line
/// * `cdf/bce_points.csv` and `cdf/bce_domains.csv`, pooled by capture point
///   and by domain mean, plus `_len{L}` variants per clickstream length
/// * `cdf/did_<feature>_points.csv` and `cdf/did_<feature>_domains.csv`
/// * `ad_requests.csv` pairing each domain's mean difference with its ad
///   request counts per group
/// * `report.json`
pub fn analyze_store(
    store: &Store,
    out: &Path,
    ads: &AdDomains,
    chunk_px: NonZeroU32,
) -> Result<AnalysisReport, AnalyzeError> {
    let cdf_dir = out.join("cdf");
    fs::create_dir_all(&cdf_dir).map_err(io_err(&cdf_dir))?;
    let records = store.records()?;

    let summaries: Vec<DomainSummary> = records
        .iter()
        .map(|record| {
            summarize_domain(record, ads, chunk_px, |capture| {
                let rel = capture.screenshot.as_deref().unwrap_or_default();
                store.read_screenshot(&record.apex.name, rel)
            })
        })
        .collect();

    let path = out.join("summaries.jsonl");
    let mut file = fs::File::create(&path).map_err(io_err(&path))?;
    for summary in &summaries {
        serde_json::to_writer(&mut file, summary)?;
        file.write_all(b"\n").map_err(io_err(&path))?;
    }

    let mut report = AnalysisReport {
        domains: records.len(),
        ad_domains: ads.len(),
        ..AnalysisReport::default()
    };
    for record in &records {
        *report.statuses.entry(status_key(record.status)).or_default() += 1;
    }

    let mut point_deltas = Vec::new();
    let mut domain_means = Vec::new();
    let mut by_length: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for s in &summaries {
        report.capture_points += s.steps.len();
        report.skipped_dimension_mismatch += s.skipped_dimension_mismatch;
        report.skipped_no_stable_chunks += s.skipped_no_stable_chunks;
        report.dropped_points += s.dropped;
        report.unreadable_points += s.unreadable;
        report.skipped_domains += usize::from(s.skipped);
        report.no_common_points += usize::from(s.no_common_points);
        for &len in &s.clickstream_lengths {
            *report.clickstream_lengths.entry(len).or_default() += 1;
        }
        let deltas: Vec<f64> = s.deltas().collect();
        report.scored_points += deltas.len();
        point_deltas.extend_from_slice(&deltas);
        if let Some(m) = s.mean_delta {
            domain_means.push(m);
        }
        let mut per_len: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for step in &s.steps {
            if let Some(d) = step.bce.delta() {
                per_len.entry(step.clickstream_length).or_default().push(d);
            }
        }
        for (len, values) in per_len {
            let slot = by_length.entry(len).or_default();
            slot.1.extend(mean(&values));
            slot.0.extend(values);
        }
    }
    report.scored_domains = domain_means.len();
    report.mean_of_domain_means = mean(&domain_means);

    write_cdf(&point_deltas, "bce", &cdf_dir.join("bce_points.csv"))?;
    write_cdf(&domain_means, "bce", &cdf_dir.join("bce_domains.csv"))?;
    for (len, (points, domains)) in &by_length {
        let label = format!("bce_len{len}");
        write_cdf(points, &label, &cdf_dir.join(format!("bce_points_len{len}.csv")))?;
        write_cdf(domains, &label, &cdf_dir.join(format!("bce_domains_len{len}.csv")))?;
    }

    for feature in FeatureKind::ALL {
        let mut points = Vec::new();
        let mut domains = Vec::new();
        for s in &summaries {
            let values: Vec<f64> = s.did_values(feature).map(|d| d.value).collect();
            domains.extend(mean(&values));
            points.extend(values);
        }
        let label = format!("did_{}", feature.as_str());
        write_cdf(&points, &label, &cdf_dir.join(format!("{label}_points.csv")))?;
        write_cdf(&domains, &label, &cdf_dir.join(format!("{label}_domains.csv")))?;
    }

    let path = out.join("ad_requests.csv");
    let mut writer = csv::Writer::from_path(&path).map_err(cookiediff_core::Error::from)?;
    writer
        .write_record(["domain", "rank", "mean_delta", "baseline", "control", "experimental"])
        .map_err(cookiediff_core::Error::from)?;
    for s in &summaries {
        writer
            .write_record([
                s.domain.clone(),
                s.rank.to_string(),
                s.mean_delta.map(|m| m.to_string()).unwrap_or_default(),
                s.ad_requests.baseline.to_string(),
                s.ad_requests.control.to_string(),
                s.ad_requests.experimental.to_string(),
            ])
            .map_err(cookiediff_core::Error::from)?;
    }
    writer.flush().map_err(io_err(&path))?;

    let path = out.join("report.json");
    fs::write(&path, serde_json::to_vec_pretty(&report)?).map_err(io_err(&path))?;
    Ok(report)
}
