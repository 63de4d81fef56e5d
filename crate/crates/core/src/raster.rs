//! RGBA rasters and their fixed-size chunk grid.
//!
//! Screenshots are decoded to 8-bit RGBA before anything is hashed or compared,
//! so two captures are equal exactly when their decoded pixels are equal,
//! independent of how the PNG encoder chose to compress them.

use std::io::Cursor;
use std::num::NonZeroU32;

use image::{ImageFormat, RgbaImage};

use crate::{Error, Result};

/// Chunk edge length, in pixels, used for shingling and BCE comparison.
pub const DEFAULT_CHUNK_PX: NonZeroU32 = NonZeroU32::new(40).unwrap();

const BYTES_PER_PIXEL: usize = 4;

#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    rgba: Vec<u8>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: u32, height: u32, rgba: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize * BYTES_PER_PIXEL;
        if rgba.len() != expected {
            return Err(Error::BufferSize {
                width,
                height,
                expected,
                actual: rgba.len(),
            });
        }
        Ok(Raster {
            width,
            height,
            rgba,
        })
    }

    pub fn filled(width: u32, height: u32, color: [u8; 4]) -> Self {
        let rgba = color
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * BYTES_PER_PIXEL)
            .collect();
        Raster {
            width,
            height,
            rgba,
        }
    }

    /// Decodes any PNG (palette, grey, RGB, 16-bit) into 8-bit RGBA.
    pub fn from_png(bytes: &[u8]) -> Result<Self> {
        let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.into_rgba8();
        let (width, height) = decoded.dimensions();
        Ok(Raster {
            width,
            height,
            rgba: decoded.into_raw(),
        })
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let img = RgbaImage::from_raw(self.width, self.height, self.rgba.clone())
            .expect("buffer length checked at construction");
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png)?;
        Ok(out.into_inner())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.rgba
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let at = self.offset(x, y);
        self.rgba[at..at + BYTES_PER_PIXEL].try_into().unwrap()
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, color: [u8; 4]) {
        let at = self.offset(x, y);
        self.rgba[at..at + BYTES_PER_PIXEL].copy_from_slice(&color);
    }

    /// Paints the axis-aligned rectangle, clipped to the raster bounds.
    pub fn fill_rect(&mut self, x: u32, y: u32, width: u32, height: u32, color: [u8; 4]) {
        let x_end = x.saturating_add(width).min(self.width);
        let y_end = y.saturating_add(height).min(self.height);
        for py in y.min(self.height)..y_end {
            for px in x.min(self.width)..x_end {
                self.set_pixel(px, py, color);
            }
        }
    }

    fn row_span(&self, y: u32, x: u32, width: u32) -> &[u8] {
        let start = self.offset(x, y);
        &self.rgba[start..start + width as usize * BYTES_PER_PIXEL]
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x},{y}) outside {}x{}",
            self.width,
            self.height
        );
        (y as usize * self.width as usize + x as usize) * BYTES_PER_PIXEL
    }
}

/// Number of chunk columns and rows covering `width`×`height`; partial edge
/// chunks count as whole cells.
pub fn grid_dimensions(width: u32, height: u32, chunk_px: NonZeroU32) -> (u32, u32) {
    (width.div_ceil(chunk_px.get()), height.div_ceil(chunk_px.get()))
}

/// One cell of a raster's chunk grid. Chunks on the right and bottom edges keep
/// their natural (possibly smaller) size.
#[derive(Clone, Copy, Debug)]
pub struct Chunk<'a> {
    raster: &'a Raster,
    pub column: u32,
    pub row: u32,
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl<'a> Chunk<'a> {
    /// Pixel rows of the chunk, top to bottom, each `width * 4` bytes.
    pub fn rows(&self) -> impl Iterator<Item = &'a [u8]> + 'a {
        let (raster, x, width) = (self.raster, self.x, self.width);
        (self.y..self.y + self.height).map(move |y| raster.row_span(y, x, width))
    }

    /// Raw RGBA bytes in row-major order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width as usize * self.height as usize * 4);
        for row in self.rows() {
            out.extend_from_slice(row);
        }
        out
    }

    pub fn same_pixels(&self, other: &Chunk<'_>) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.rows().zip(other.rows()).all(|(a, b)| a == b)
    }
}

/// Splits the raster into `chunk_px`-square cells in row-major order.
pub fn chunk_grid(raster: &Raster, chunk_px: NonZeroU32) -> Result<Vec<Chunk<'_>>> {
    if raster.is_empty() {
        return Err(Error::EmptyImage);
    }
    let step = chunk_px.get();
    let (columns, rows) = grid_dimensions(raster.width, raster.height, chunk_px);
    let mut chunks = Vec::with_capacity(columns as usize * rows as usize);
    for row in 0..rows {
        let y = row * step;
        let height = step.min(raster.height - y);
        for column in 0..columns {
            let x = column * step;
            chunks.push(Chunk {
                raster,
                column,
                row,
                x,
                y,
                width: step.min(raster.width - x),
                height,
            });
        }
    }
    Ok(chunks)
}
