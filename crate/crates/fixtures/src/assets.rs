use std::io::Cursor;

use image::{ImageFormat, Rgb, RgbImage};

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// A 160×100 striped PNG whose colors are a pure function of `name`.
pub fn tile_png(name: &str) -> Vec<u8> {
    let h = fnv1a(name.as_bytes());
    let base = Rgb([(h >> 8) as u8, (h >> 16) as u8, (h >> 24) as u8]);
    let stripe = Rgb([!base.0[0], !base.0[1], !base.0[2]]);
    let period = 8 + (h % 17) as u32;
    let img = RgbImage::from_fn(160, 100, |x, y| {
        if ((x + y) / period).is_multiple_of(2) {
            base
        } else {
            stripe
        }
    });
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)
        .expect("in-memory png encode");
    out.into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_are_deterministic_and_distinct() {
        assert_eq!(tile_png("a"), tile_png("a"));
        assert_ne!(tile_png("a"), tile_png("b"));
        assert_eq!(&tile_png("a")[1..4], b"PNG");
    }
}
