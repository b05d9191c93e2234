//! Exact-coverage occlusion masks.
//!
//! Every generator returns a mask whose occluded pixel count equals
//! [`target_pixels`] for the requested fraction. Geometry is a pure function
//! of the [`OcclusionSpec`]; random kinds draw from [`SplitMix64`] seeded
//! with `spec.seed`.
//!
//! [`SplitMix64`]: crate::rng::SplitMix64

mod contiguous;
mod dispersed;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OcclusionKind {
    Slide,
    Bars,
    Rain,
    Snow,
    Grid,
}

impl OcclusionKind {
    pub const ALL: [OcclusionKind; 5] = [
        OcclusionKind::Slide,
        OcclusionKind::Bars,
        OcclusionKind::Rain,
        OcclusionKind::Snow,
        OcclusionKind::Grid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OcclusionKind::Slide => "slide",
            OcclusionKind::Bars => "bars",
            OcclusionKind::Rain => "rain",
            OcclusionKind::Snow => "snow",
            OcclusionKind::Grid => "grid",
        }
    }

    /// Rain and snow scatter many small shapes; the rest occlude large connected regions.
    pub fn is_dispersed(self) -> bool {
        matches!(self, OcclusionKind::Rain | OcclusionKind::Snow)
    }
}

impl fmt::Display for OcclusionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OcclusionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OcclusionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown occlusion kind {s:?}")))
    }
}

/// Per-kind shape parameters. Only the fields relevant to a spec's kind are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KindParams {
    pub bar_count: u32,
    pub grid_rows: u32,
    pub grid_cols: u32,
    pub snow_diameter_min: u32,
    pub snow_diameter_max: u32,
    pub rain_angle_jitter_deg: f64,
    /// Streak length bounds as fractions of image height.
    pub rain_length_min_frac: f64,
    pub rain_length_max_frac: f64,
    pub rain_width_px: u32,
}

impl Default for KindParams {
    fn default() -> Self {
        Self {
            bar_count: 6,
            grid_rows: 10,
            grid_cols: 10,
            snow_diameter_min: 1,
            snow_diameter_max: 3,
            rain_angle_jitter_deg: 5.0,
            rain_length_min_frac: 0.10,
            rain_length_max_frac: 0.25,
            rain_width_px: 2,
        }
    }
}

impl KindParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.to_string()));
        if self.bar_count == 0 {
            return bad("bar_count must be >= 1");
        }
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return bad("grid_rows and grid_cols must be >= 1");
        }
        if self.snow_diameter_min == 0 || self.snow_diameter_min > self.snow_diameter_max {
            return bad("snow diameters must satisfy 1 <= min <= max");
        }
        if !(self.rain_angle_jitter_deg.is_finite() && self.rain_angle_jitter_deg >= 0.0) {
            return bad("rain_angle_jitter_deg must be finite and non-negative");
        }
        let (lo, hi) = (self.rain_length_min_frac, self.rain_length_max_frac);
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad("rain length fractions must satisfy 0 < min <= max");
        }
        if self.rain_width_px == 0 {
            return bad("rain_width_px must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcclusionSpec {
    pub kind: OcclusionKind,
    /// Occluded area fraction in `[0, 1]`.
    pub fraction: f64,
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    #[serde(default)]
    pub params: KindParams,
}

impl OcclusionSpec {
    pub fn new(kind: OcclusionKind, fraction: f64, width: u32, height: u32, seed: u64) -> Self {
        Self {
            kind,
            fraction,
            width,
            height,
            seed,
            params: KindParams::default(),
        }
    }

    pub fn with_params(mut self, params: KindParams) -> Self {
        self.params = params;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidSpec(format!(
                "canvas must be at least 1x1, got {}x{}",
                self.width, self.height
            )));
        }
        check_fraction(self.fraction)?;
        self.params.validate()
    }

    pub fn target_pixels(&self) -> Result<usize> {
        target_pixels(self.fraction, self.width, self.height)
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if (0.0..=1.0).contains(&fraction) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "fraction must lie in [0, 1], got {fraction}"
        )))
    }
}

/// Number of pixels to occlude: `fraction * width * height` rounded half away from zero.
pub fn target_pixels(fraction: f64, width: u32, height: u32) -> Result<usize> {
    check_fraction(fraction)?;
    let total = width as usize * height as usize;
    let t = (fraction * total as f64).round() as usize;
    Ok(t.min(total))
}

/// Builds the mask described by `spec`.
pub fn generate(spec: &OcclusionSpec) -> Result<OcclusionMask> {
    spec.validate()?;
    let target = spec.target_pixels()?;
    let (w, h) = (spec.width, spec.height);
    if target == 0 {
        return Ok(OcclusionMask::empty(w, h));
    }
    if target == w as usize * h as usize {
        return Ok(OcclusionMask::full(w, h));
    }
    let mask = match spec.kind {
        OcclusionKind::Slide => contiguous::slide(w, h, target),
        OcclusionKind::Bars => contiguous::bars(w, h, target, spec.params.bar_count),
        OcclusionKind::Grid => contiguous::grid(w, h, target, &spec.params, spec.seed),
        OcclusionKind::Rain => dispersed::rain(w, h, target, &spec.params, spec.seed),
        OcclusionKind::Snow => dispersed::snow(w, h, target, &spec.params, spec.seed),
    };
    debug_assert_eq!(mask.occluded_count(), target);
    Ok(mask)
}

/// A width x height set of occluded pixels, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct OcclusionMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
    count: usize,
}

impl fmt::Debug for OcclusionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OcclusionMask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("occluded_count", &self.count)
            .finish()
    }
}

impl OcclusionMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
            count: 0,
        }
    }

    pub fn full(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            bits: vec![true; n],
            count: n,
        }
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

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn occluded_count(&self) -> usize {
        self.count
    }

    /// Row-major occlusion flags, `width * height` long.
    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_occluded(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height && self.bits[self.index(x, y)]
    }

    pub fn iter_occluded(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    /// True when every pixel occluded here is also occluded in `other`.
    pub fn is_subset_of(&self, other: &OcclusionMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub(crate) fn set_index(&mut self, i: usize) {
        if !self.bits[i] {
            self.bits[i] = true;
            self.count += 1;
        }
    }

    pub(crate) fn set(&mut self, x: u32, y: u32) {
        let i = self.index(x, y);
        self.set_index(i);
    }

    /// Single-channel raster: 0 visible, 255 occluded.
    pub fn to_luma(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        image::save_buffer_with_format(
            path,
            &self.to_luma(),
            self.width,
            self.height,
            image::ExtendedColorType::L8,
            image::ImageFormat::Png,
        )
        .map_err(|source| crate::imaging::encode_error(path, source))
    }

    /// Run-length text form `w h;run,run,...`.
    ///
    /// Runs alternate visible/occluded in row-major order and always start
    /// with a (possibly zero-length) visible run.
    pub fn to_rle(&self) -> String {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0usize;
        for &b in &self.bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len.to_string());
                current = b;
                len = 1;
            }
        }
        runs.push(len.to_string());
        format!("{} {};{}", self.width, self.height, runs.join(","))
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidSpec(format!("malformed mask RLE: {msg}"));
        let (dims, runs) = text
            .trim()
            .split_once(';')
            .ok_or_else(|| bad("missing ';'".into()))?;
        let mut dims = dims.split_whitespace().map(str::parse::<u32>);
        let (width, height) = match (dims.next(), dims.next(), dims.next()) {
            (Some(Ok(w)), Some(Ok(h)), None) if w > 0 && h > 0 => (w, h),
            _ => return Err(bad(format!("bad dimensions {dims:?}"))),
        };
        let mut mask = OcclusionMask::empty(width, height);
        let mut pos = 0usize;
        let mut occluded = false;
        for run in runs.split(',') {
            let n: usize = run
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad run {run:?}")))?;
            if pos + n > mask.len() {
                return Err(bad("runs exceed canvas".into()));
            }
            if occluded {
                for i in pos..pos + n {
                    mask.set_index(i);
                }
            }
            pos += n;
            occluded = !occluded;
        }
        if pos != mask.len() {
            return Err(bad(format!("runs cover {pos} of {} pixels", mask.len())));
        }
        Ok(mask)
    }
}
