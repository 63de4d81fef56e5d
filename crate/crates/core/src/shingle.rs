//! Image shingling: a screenshot becomes the multiset of MD5 digests of its
//! chunks.

use std::num::NonZeroU32;

use md5::{Digest, Md5};

use crate::raster::{chunk_grid, Chunk, Raster};
use crate::{FrequencyVector, Result};

/// Lowercase hex MD5 of a chunk's raw RGBA bytes, rows concatenated top to
/// bottom.
pub fn chunk_digest(chunk: &Chunk<'_>) -> String {
    let mut hasher = Md5::new();
    for row in chunk.rows() {
        hasher.update(row);
    }
    hex::encode(hasher.finalize())
}

pub fn shingle_image(image: &Raster, chunk_px: NonZeroU32) -> Result<FrequencyVector> {
    Ok(chunk_grid(image, chunk_px)?
        .iter()
        .map(chunk_digest)
        .collect())
}
