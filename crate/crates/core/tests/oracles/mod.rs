//! Independent brute-force recomputations used as test oracles, plus the
//! random generators that feed them. Shared with the acceptance target.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cookiediff_core::{BceOutcome, FrequencyVector, Raster, SkipReason};
use rand::Rng;

pub const PALETTE: [[u8; 4]; 4] = [
    [255, 255, 255, 255],
    [0, 0, 0, 255],
    [200, 30, 30, 255],
    [30, 90, 200, 255],
];

/// Per-pixel Algorithm 1: walks every chunk region pixel by pixel.
pub fn bce_oracle(b: &Raster, c: &Raster, e: &Raster, chunk: u32) -> BceOutcome {
    if b.dimensions() != c.dimensions() || b.dimensions() != e.dimensions() {
        return BceOutcome::Skip {
            reason: SkipReason::DimensionMismatch,
        };
    }
    let (w, h) = b.dimensions();
    let (mut total, mut matches) = (0u32, 0u32);
    let mut y0 = 0;
    while y0 < h {
        let mut x0 = 0;
        while x0 < w {
            let (mut stable, mut same) = (true, true);
            for y in y0..(y0 + chunk).min(h) {
                for x in x0..(x0 + chunk).min(w) {
                    stable &= b.pixel(x, y) == c.pixel(x, y);
                    same &= b.pixel(x, y) == e.pixel(x, y);
                }
            }
            if stable {
                total += 1;
                matches += u32::from(same);
            }
            x0 += chunk;
        }
        y0 += chunk;
    }
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

/// Multiset Jaccard distance by explicit per-token min and max.
pub fn jaccard_oracle(a: &FrequencyVector, b: &FrequencyVector) -> f64 {
    let tokens: BTreeSet<&str> = a.iter().chain(b.iter()).map(|(t, _)| t.as_str()).collect();
    let (mut inter, mut union) = (0u64, 0u64);
    for t in tokens {
        inter += a.count(t).min(b.count(t));
        union += a.count(t).max(b.count(t));
    }
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, alphabet: usize, max_count: u64) -> FrequencyVector {
    let mut v = FrequencyVector::new();
    for t in 0..alphabet {
        if rng.random_bool(0.5) {
            v.add(format!("t{t}"), rng.random_range(1..=max_count));
        }
    }
    v
}

pub struct Triple {
    pub b: Raster,
    pub c: Raster,
    pub e: Raster,
    pub chunk: u32,
}

fn other_color<R: Rng>(rng: &mut R, not: [u8; 4], colors: usize) -> [u8; 4] {
    loop {
        let c = PALETTE[rng.random_range(0..colors.max(2))];
        if c != not {
            return c;
        }
    }
}

/// Changes chunk (`cx`, `cy`) of `r`: either a single pixel or the whole
/// block, retried until the chunk content really differs.
fn perturb_chunk<R: Rng>(rng: &mut R, r: &mut Raster, cx: u32, cy: u32, chunk: u32, colors: usize) {
    let (w, h) = r.dimensions();
    let (x0, y0) = (cx * chunk, cy * chunk);
    let (cw, ch) = (chunk.min(w - x0), chunk.min(h - y0));
    let region = |r: &Raster| -> Vec<[u8; 4]> {
        (y0..y0 + ch).flat_map(|y| (x0..x0 + cw).map(move |x| (x, y))).map(|(x, y)| r.pixel(x, y)).collect()
    };
    let before = region(r);
    while region(r) == before {
        if rng.random_bool(0.5) {
            let (x, y) = (x0 + rng.random_range(0..cw), y0 + rng.random_range(0..ch));
            let new = other_color(rng, r.pixel(x, y), colors);
            r.set_pixel(x, y, new);
        } else {
            let new = PALETTE[rng.random_range(0..colors)];
            r.fill_rect(x0, y0, cw, ch, new);
        }
    }
}

/// A random (B, C, E) triple over a grid of at most 10×10 chunks in at most
/// four colors, with partial edge chunks. `force` selects the skip cases.
pub fn random_triple<R: Rng>(rng: &mut R, force: Option<SkipReason>) -> Triple {
    let chunk = [1u32, 2, 3, 4, 6, 8, 40][rng.random_range(0..7)];
    let cols = rng.random_range(1..=10u32);
    let rows = rng.random_range(1..=10u32);
    let w = cols * chunk - if chunk > 1 { rng.random_range(0..chunk) } else { 0 };
    let h = rows * chunk - if chunk > 1 { rng.random_range(0..chunk) } else { 0 };
    let colors = rng.random_range(2..=4usize);

    let mut b = Raster::filled(w, h, PALETTE[0]);
    for cy in 0..rows {
        for cx in 0..cols {
            let color = PALETTE[rng.random_range(0..colors)];
            let (x0, y0) = (cx * chunk, cy * chunk);
            b.fill_rect(x0, y0, chunk.min(w - x0), chunk.min(h - y0), color);
        }
    }
    for _ in 0..rng.random_range(0..(w * h / 4).max(1)) {
        let (x, y) = (rng.random_range(0..w), rng.random_range(0..h));
        b.set_pixel(x, y, PALETTE[rng.random_range(0..colors)]);
    }

    let mut c = b.clone();
    let mut e = b.clone();
    let p_c = rng.random_range(0.0..0.5);
    let p_e = rng.random_range(0.0..0.8);
    for cy in 0..rows {
        for cx in 0..cols {
            let all = force == Some(SkipReason::NoStableChunks);
            if all || rng.random_bool(p_c) {
                perturb_chunk(rng, &mut c, cx, cy, chunk, colors);
            }
            if rng.random_bool(p_e) {
                perturb_chunk(rng, &mut e, cx, cy, chunk, colors);
            }
        }
    }
    if force == Some(SkipReason::DimensionMismatch) {
        let grown = Raster::filled(w + 1, h, PALETTE[0]);
        if rng.random_bool(0.5) {
            c = grown;
        } else {
            e = grown;
        }
    }
    Triple { b, c, e, chunk }
}
