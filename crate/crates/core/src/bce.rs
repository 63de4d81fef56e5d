//! Baseline/control/experimental screenshot difference.
//!
//! Chunks that already differ between baseline and control are dynamic content
//! and are excluded. Of the chunks that remain, the difference is the fraction
//! that changed between baseline and experimental.

use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::raster::{chunk_grid, Raster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    DimensionMismatch,
    NoStableChunks,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum BceOutcome {
    Difference { delta: f64, matches: u32, total: u32 },
    Skip { reason: SkipReason },
}

impl BceOutcome {
    fn from_counts(matches: u32, total: u32) -> Self {
        if total == 0 {
            return BceOutcome::Skip {
                reason: SkipReason::NoStableChunks,
            };
        }
        BceOutcome::Difference {
            delta: 1.0 - f64::from(matches) / f64::from(total),
            matches,
            total,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match *self {
            BceOutcome::Difference { delta, .. } => Some(delta),
            BceOutcome::Skip { .. } => None,
        }
    }

    pub fn skip_reason(&self) -> Option<SkipReason> {
        match *self {
            BceOutcome::Skip { reason } => Some(reason),
            BceOutcome::Difference { .. } => None,
        }
    }
}

/// How one aligned chunk position behaved across the three captures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChunkClass {
    /// Baseline and control differ: dynamic content, excluded.
    Unstable,
    /// Stable between baseline and control, and unchanged in experimental.
    Matched,
    /// Stable between baseline and control, but changed in experimental.
    Changed,
}

/// Per-chunk classification in row-major order, or the reason the triple
/// cannot be compared at all.
pub fn bce_chunk_map(
    baseline: &Raster,
    control: &Raster,
    experimental: &Raster,
    chunk_px: NonZeroU32,
) -> Result<Vec<ChunkClass>, SkipReason> {
    let dims = baseline.dimensions();
    if control.dimensions() != dims || experimental.dimensions() != dims {
        return Err(SkipReason::DimensionMismatch);
    }
    if baseline.is_empty() {
        return Err(SkipReason::NoStableChunks);
    }
    let grid = |r| chunk_grid(r, chunk_px).expect("non-empty raster");
    let (b, c, e) = (grid(baseline), grid(control), grid(experimental));
    Ok(b.iter()
        .zip(&c)
        .zip(&e)
        .map(|((b, c), e)| {
            if !b.same_pixels(c) {
                ChunkClass::Unstable
            } else if b.same_pixels(e) {
                ChunkClass::Matched
            } else {
                ChunkClass::Changed
            }
        })
        .collect())
}

pub fn bce_screenshot_difference(
    baseline: &Raster,
    control: &Raster,
    experimental: &Raster,
    chunk_px: NonZeroU32,
) -> BceOutcome {
    match bce_chunk_map(baseline, control, experimental, chunk_px) {
        Err(reason) => BceOutcome::Skip { reason },
        Ok(classes) => {
            let mut matches = 0;
            let mut total = 0;
            for class in classes {
                match class {
                    ChunkClass::Unstable => {}
                    ChunkClass::Matched => {
                        total += 1;
                        matches += 1;
                    }
                    ChunkClass::Changed => total += 1,
                }
            }
            BceOutcome::from_counts(matches, total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::DEFAULT_CHUNK_PX;

    const WHITE: [u8; 4] = [255; 4];
    const RED: [u8; 4] = [255, 0, 0, 255];

    #[test]
    fn identical_triple_is_zero() {
        let img = Raster::filled(120, 80, WHITE);
        let out = bce_screenshot_difference(&img, &img, &img, DEFAULT_CHUNK_PX);
        assert_eq!(out, BceOutcome::Difference { delta: 0.0, matches: 6, total: 6 });
    }

    #[test]
    fn three_of_twelve_changed() {
        // 4x3 grid of 40px chunks
        let b = Raster::filled(160, 120, WHITE);
        let mut e = b.clone();
        for (x, y) in [(0, 0), (80, 40), (120, 80)] {
            e.set_pixel(x + 39, y + 39, RED);
        }
        let out = bce_screenshot_difference(&b, &b, &e, DEFAULT_CHUNK_PX);
        assert_eq!(out, BceOutcome::Difference { delta: 0.25, matches: 9, total: 12 });
    }

    #[test]
    fn fully_dynamic_page_is_skipped() {
        let b = Raster::filled(80, 80, WHITE);
        let c = Raster::filled(80, 80, RED);
        let out = bce_screenshot_difference(&b, &c, &b, DEFAULT_CHUNK_PX);
        assert_eq!(out.skip_reason(), Some(SkipReason::NoStableChunks));
    }

    #[test]
    fn dimension_mismatch_is_skipped() {
        let b = Raster::filled(80, 80, WHITE);
        let e = Raster::filled(80, 81, WHITE);
        for (x, y, z) in [(&b, &b, &e), (&b, &e, &b), (&e, &b, &b)] {
            assert_eq!(
                bce_screenshot_difference(x, y, z, DEFAULT_CHUNK_PX).skip_reason(),
                Some(SkipReason::DimensionMismatch)
            );
        }
    }

    #[test]
    fn dynamic_chunks_are_filtered() {
        let b = Raster::filled(80, 40, WHITE);
        let mut c = b.clone();
        c.set_pixel(0, 0, RED);
        // experimental differs only where baseline and control already disagree
        let mut e = b.clone();
        e.set_pixel(1, 1, RED);
        let out = bce_screenshot_difference(&b, &c, &e, DEFAULT_CHUNK_PX);
        assert_eq!(out, BceOutcome::Difference { delta: 0.0, matches: 1, total: 1 });
    }

    #[test]
    fn empty_rasters_have_no_stable_chunks() {
        let img = Raster::new(0, 0, Vec::new()).unwrap();
        assert_eq!(
            bce_screenshot_difference(&img, &img, &img, DEFAULT_CHUNK_PX).skip_reason(),
            Some(SkipReason::NoStableChunks)
        );
    }

    #[test]
    fn outcome_serializes_tagged() {
        let out = BceOutcome::Skip { reason: SkipReason::NoStableChunks };
        assert_eq!(
            serde_json::to_string(&out).unwrap(),
            r#"{"outcome":"skip","reason":"no_stable_chunks"}"#
        );
    }
}
