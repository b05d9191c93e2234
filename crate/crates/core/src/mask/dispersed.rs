//! Rain and snow: union of randomly placed shapes, trimmed to the exact target.
//!
//! Each shape draws its parameters from the stream in a fixed order
//! (anchor x, anchor y, then size/angle). Shapes that add no new pixels are
//! discarded; after [`SATURATION_MISSES`] consecutive discards every later
//! shape uses its largest size. When the union overshoots the target, the
//! pixels contributed only by the last shape are dropped bottom-right first.

use super::{KindParams, OcclusionMask};
use crate::rng::SplitMix64;

pub(crate) const SATURATION_MISSES: u32 = 1000;

fn accumulate<F>(w: u32, h: u32, target: usize, seed: u64, mut shape: F) -> OcclusionMask
where
    F: FnMut(&mut SplitMix64, bool, &mut Vec<usize>),
{
    let mut rng = SplitMix64::new(seed);
    let mut mask = OcclusionMask::empty(w, h);
    let mut pixels = Vec::new();
    let mut misses = 0u32;
    let mut saturated = false;
    while mask.occluded_count() < target {
        pixels.clear();
        shape(&mut rng, saturated, &mut pixels);
        pixels.retain(|&i| !mask.as_slice()[i]);
        if pixels.is_empty() {
            misses += 1;
            if misses >= SATURATION_MISSES {
                saturated = true;
            }
            continue;
        }
        misses = 0;
        // `pixels` is in raster order, so keeping a prefix trims from the bottom-right.
        let room = target - mask.occluded_count();
        for &i in pixels.iter().take(room) {
            mask.set_index(i);
        }
    }
    mask
}

/// Pixels (raster order) whose centers lie within `radius` of the segment `a`-`b`.
pub(crate) fn rasterize_capsule(
    w: u32,
    h: u32,
    a: (f64, f64),
    b: (f64, f64),
    radius: f64,
    out: &mut Vec<usize>,
) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let x_lo = (a.0.min(b.0) - radius).floor().max(0.0) as u32;
    let x_hi = ((a.0.max(b.0) + radius).ceil().max(0.0) as u32).min(w);
    let y_lo = (a.1.min(b.1) - radius).floor().max(0.0) as u32;
    let y_hi = ((a.1.max(b.1) + radius).ceil().max(0.0) as u32).min(h);
    let r2 = radius * radius;
    for y in y_lo..y_hi {
        let py = f64::from(y) + 0.5;
        for x in x_lo..x_hi {
            let px = f64::from(x) + 0.5;
            let t = if len2 > 0.0 {
                (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (qx, qy) = (a.0 + t * dx - px, a.1 + t * dy - py);
            if qx * qx + qy * qy <= r2 {
                out.push(y as usize * w as usize + x as usize);
            }
        }
    }
}

/// Pixels (raster order) whose centers lie within `diameter / 2` of `center`.
pub(crate) fn rasterize_disc(
    w: u32,
    h: u32,
    center: (f64, f64),
    diameter: u32,
    out: &mut Vec<usize>,
) {
    rasterize_capsule(w, h, center, center, f64::from(diameter) / 2.0, out);
}

pub(super) fn rain(w: u32, h: u32, target: usize, p: &KindParams, seed: u64) -> OcclusionMask {
    let (fw, fh) = (f64::from(w), f64::from(h));
    let jitter = p.rain_angle_jitter_deg;
    let (len_min, len_max) = (p.rain_length_min_frac * fh, p.rain_length_max_frac * fh);
    let radius = f64::from(p.rain_width_px) / 2.0;
    accumulate(w, h, target, seed, |rng, saturated, out| {
        let ax = rng.uniform(0.0, fw);
        let ay = rng.uniform(0.0, fh);
        let angle = rng.uniform(-jitter, jitter).to_radians();
        let drawn = rng.uniform(len_min, len_max);
        let len = if saturated { len_max } else { drawn };
        // Streaks fall from the anchor, tilted `angle` off vertical.
        let end = (ax + len * angle.sin(), ay + len * angle.cos());
        rasterize_capsule(w, h, (ax, ay), end, radius, out);
    })
}

pub(super) fn snow(w: u32, h: u32, target: usize, p: &KindParams, seed: u64) -> OcclusionMask {
    let (fw, fh) = (f64::from(w), f64::from(h));
    let (d_min, d_max) = (p.snow_diameter_min, p.snow_diameter_max);
    accumulate(w, h, target, seed, |rng, saturated, out| {
        let cx = rng.uniform(0.0, fw);
        let cy = rng.uniform(0.0, fh);
        let drawn = d_min + rng.below(u64::from(d_max - d_min) + 1) as u32;
        let d = if saturated { d_max } else { drawn };
        rasterize_disc(w, h, (cx, cy), d, out);
    })
}
