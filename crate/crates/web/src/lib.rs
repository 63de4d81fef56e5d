//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Pixel buffers cross the boundary as tightly packed RGBA bytes, the layout
//! of `ImageData.data`.

use std::num::NonZeroU32;

use cookiediff_core::raster::grid_dimensions;
use cookiediff_core::{bce_chunk_map, did, jaccard_distance, shingle_image, tokenize_text, ChunkClass, Raster};
use wasm_bindgen::prelude::*;

fn raster(width: u32, height: u32, rgba: &[u8]) -> Result<Raster, JsError> {
    Raster::new(width, height, rgba.to_vec()).map_err(|e| JsError::new(&e.to_string()))
}

fn chunk(px: u32) -> Result<NonZeroU32, JsError> {
    NonZeroU32::new(px).ok_or_else(|| JsError::new("chunk size must be positive"))
}

/// Per-chunk classification of a baseline/control/experimental triple.
#[wasm_bindgen]
pub struct ChunkMap {
    cols: u32,
    rows: u32,
    classes: Vec<u8>,
    delta: Option<f64>,
    skip: Option<String>,
}

#[wasm_bindgen]
impl ChunkMap {
    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> u32 {
        self.cols
    }

    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// Row-major: 0 unstable, 1 matched, 2 changed.
    #[wasm_bindgen(getter)]
    pub fn classes(&self) -> Vec<u8> {
        self.classes.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    #[wasm_bindgen(getter)]
    pub fn skip(&self) -> Option<String> {
        self.skip.clone()
    }
}

#[wasm_bindgen(js_name = chunkMap)]
pub fn chunk_map(
    width: u32,
    height: u32,
    baseline: &[u8],
    control: &[u8],
    experimental: &[u8],
    chunk_px: u32,
) -> Result<ChunkMap, JsError> {
    let px = chunk(chunk_px)?;
    let (b, c, e) = (
        raster(width, height, baseline)?,
        raster(width, height, control)?,
        raster(width, height, experimental)?,
    );
    let (cols, rows) = grid_dimensions(width, height, px);
    Ok(match bce_chunk_map(&b, &c, &e, px) {
        Err(reason) => ChunkMap {
            cols,
            rows,
            classes: Vec::new(),
            delta: None,
            skip: Some(format!("{reason:?}")),
        },
        Ok(map) => {
            let classes: Vec<u8> = map
                .iter()
                .map(|class| match class {
                    ChunkClass::Unstable => 0,
                    ChunkClass::Matched => 1,
                    ChunkClass::Changed => 2,
                })
                .collect();
            let stable = classes.iter().filter(|&&c| c != 0).count();
            let matched = classes.iter().filter(|&&c| c == 1).count();
            ChunkMap {
                cols,
                rows,
                classes,
                delta: (stable > 0).then(|| 1.0 - matched as f64 / stable as f64),
                skip: (stable == 0).then(|| "NoStableChunks".to_string()),
            }
        }
    })
}

/// Shingle multiset of an image: distinct chunk digests and their counts.
#[wasm_bindgen]
pub struct Shingles {
    tokens: Vec<String>,
    counts: Vec<u32>,
}

#[wasm_bindgen]
impl Shingles {
    #[wasm_bindgen(getter)]
    pub fn tokens(&self) -> Vec<String> {
        self.tokens.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn counts(&self) -> Vec<u32> {
        self.counts.clone()
    }
}

#[wasm_bindgen]
pub fn shingles(width: u32, height: u32, rgba: &[u8], chunk_px: u32) -> Result<Shingles, JsError> {
    let v = shingle_image(&raster(width, height, rgba)?, chunk(chunk_px)?).map_err(|e| JsError::new(&e.to_string()))?;
    let (tokens, counts) = v.iter().map(|(t, &n)| (t.clone(), n as u32)).unzip();
    Ok(Shingles { tokens, counts })
}

/// Jaccard distance between the word multisets of two texts.
#[wasm_bindgen(js_name = textDistance)]
pub fn text_distance(a: &str, b: &str) -> f64 {
    jaccard_distance(&tokenize_text(a), &tokenize_text(b))
}

/// Word-level difference in distance for a baseline/control/experimental trio.
#[wasm_bindgen(js_name = textDid)]
pub fn text_did(baseline: &str, control: &str, experimental: &str) -> f64 {
    did(&tokenize_text(baseline), &tokenize_text(control), &tokenize_text(experimental))
}
