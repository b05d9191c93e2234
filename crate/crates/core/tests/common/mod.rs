#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::Path;

use occlubench_core::rng::SplitMix64;
use occlubench_core::{OcclusionMask, RasterImage};

/// Number of 4-connected components among occluded pixels, by BFS flood fill.
pub fn components4(mask: &OcclusionMask) -> usize {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.as_slice();
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if !bits[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if bits[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
    }
    count
}

pub fn popcount(mask: &OcclusionMask) -> usize {
    mask.as_slice().iter().filter(|&&b| b).count()
}

/// Trapezoid rule over explicit level coordinates, normalized by the level
/// span and the first accuracy.
pub fn trapezoid_oracle(levels: &[f64], acc: &[f64]) -> f64 {
    let mut area = 0.0;
    for i in 1..levels.len() {
        let dx = levels[i] - levels[i - 1];
        area += dx * acc[i - 1] + dx * (acc[i] - acc[i - 1]) * 0.5;
    }
    let span = levels[levels.len() - 1] - levels[0];
    area / span / acc[0]
}

pub fn sweep_levels_f64() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) * 5.0).collect()
}

/// Random RGB image whose red channel stays below 100, so no pixel (and no
/// bilinear blend of pixels) ever equals the 128-gray fill.
pub fn gray_free_noise(w: u32, h: u32, seed: u64) -> RasterImage {
    let mut rng = SplitMix64::new(seed);
    let mut data = Vec::with_capacity(3 * (w * h) as usize);
    for _ in 0..w * h {
        data.push(rng.below(100) as u8);
        data.push(rng.below(256) as u8);
        data.push(rng.below(256) as u8);
    }
    RasterImage::new(w, h, data).unwrap()
}

/// Writes `<root>/<class>/<class>_<n>.png` source images.
pub fn write_dataset(root: &Path, classes: &[&str], per_class: usize, w: u32, h: u32) {
    for (ci, class) in classes.iter().enumerate() {
        for n in 0..per_class {
            let img = gray_free_noise(w, h, (ci * 1000 + n) as u64);
            let path = root.join(class).join(format!("{class}_{n:02}.png"));
            occlubench_core::write_image(&img, &path, occlubench_core::OutputFormat::Png).unwrap();
        }
    }
}

/// Touches empty-ish placeholder files; enough for split tests that never decode.
pub fn touch_dataset(root: &Path, class: &str, count: usize) {
    let dir = root.join(class);
    std::fs::create_dir_all(&dir).unwrap();
    for n in 0..count {
        std::fs::write(dir.join(format!("{class}_{n:03}.jpg")), b"").unwrap();
    }
}
