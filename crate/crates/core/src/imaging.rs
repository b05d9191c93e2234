//! RGB rasters: decoding, bilinear resampling, gray-fill occlusion and PNG output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checksum::fnv1a64;
use crate::error::{Error, Result};
use crate::mask::OcclusionMask;

/// 8-bit RGB, row-major, no padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != 3 * width as usize * height as usize {
            return Err(Error::InvalidDims { width, height });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, color: FillColor) -> Result<Self> {
        let n = width as usize * height as usize;
        let data = [color.r, color.g, color.b].repeat(n);
        Self::new(width, height, data)
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

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// FNV-1a over the raw RGB bytes.
    pub fn checksum(&self) -> u64 {
        fnv1a64(&self.data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl FillColor {
    pub const GRAY: FillColor = FillColor {
        r: 128,
        g: 128,
        b: 128,
    };

    pub fn rgb(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

impl Default for FillColor {
    fn default() -> Self {
        Self::GRAY
    }
}

impl std::str::FromStr for FillColor {
    type Err = Error;

    /// Parses `r,g,b`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<u8>()).collect();
        match parts.as_slice() {
            [Ok(r), Ok(g), Ok(b)] => Ok(FillColor {
                r: *r,
                g: *g,
                b: *b,
            }),
            _ => Err(Error::InvalidConfig(format!(
                "fill must be r,g,b with 0..=255 components, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Png,
    Jpeg,
}

pub(crate) fn encode_error(path: &Path, source: image::ImageError) -> Error {
    match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Encode {
            path: path.to_path_buf(),
            source,
        },
    }
}

/// Decodes a PNG or JPEG into RGB. Gray inputs are expanded; alpha is composited over black.
///
/// JPEG streams without an end-of-image marker are rejected as truncated.
pub fn load_image(path: &Path) -> Result<RasterImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let decode_err = |source| Error::Decode {
        path: path.to_path_buf(),
        source,
    };
    let format = image::guess_format(&bytes).map_err(decode_err)?;
    if format == image::ImageFormat::Jpeg && !bytes.windows(2).any(|w| w == [0xFF, 0xD9]) {
        return Err(decode_err(image::ImageError::Decoding(
            image::error::DecodingError::new(
                format.into(),
                "truncated stream: no end-of-image marker",
            ),
        )));
    }
    let decoded = image::load_from_memory_with_format(&bytes, format).map_err(decode_err)?;
    let (width, height) = (decoded.width(), decoded.height());
    let data = if decoded.color().has_alpha() {
        let rgba = decoded.into_rgba8();
        rgba.pixels()
            .flat_map(|p| {
                let [r, g, b, a] = p.0;
                [over_black(r, a), over_black(g, a), over_black(b, a)]
            })
            .collect()
    } else {
        decoded.into_rgb8().into_raw()
    };
    RasterImage::new(width, height, data)
}

fn over_black(c: u8, alpha: u8) -> u8 {
    ((u32::from(c) * u32::from(alpha) + 127) / 255) as u8
}

/// Bilinear resample to exactly `target_w x target_h`, aspect ratio not preserved.
///
/// Uses pixel-center alignment: output pixel `x` samples source coordinate
/// `(x + 0.5) * src_w / target_w - 0.5`, clamped to the edge. Channels are
/// rounded to nearest. Same-size input is returned unchanged.
pub fn resize(image: &RasterImage, target_w: u32, target_h: u32) -> Result<RasterImage> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::InvalidDims {
            width: target_w,
            height: target_h,
        });
    }
    if image.dimensions() == (target_w, target_h) {
        return Ok(image.clone());
    }
    let xs = sample_axis(image.width, target_w);
    let ys = sample_axis(image.height, target_h);
    let mut data = Vec::with_capacity(3 * target_w as usize * target_h as usize);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let p00 = image.pixel(x0, y0);
            let p10 = image.pixel(x1, y0);
            let p01 = image.pixel(x0, y1);
            let p11 = image.pixel(x1, y1);
            for c in 0..3 {
                let top = f64::from(p00[c]) * (1.0 - fx) + f64::from(p10[c]) * fx;
                let bottom = f64::from(p01[c]) * (1.0 - fx) + f64::from(p11[c]) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(target_w, target_h, data)
}

fn sample_axis(src: u32, dst: u32) -> Vec<(u32, u32, f64)> {
    let scale = f64::from(src) / f64::from(dst);
    let last = f64::from(src - 1);
    (0..dst)
        .map(|i| {
            let s = ((f64::from(i) + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = s.floor();
            let hi = (lo + 1.0).min(last);
            (lo as u32, hi as u32, s - lo)
        })
        .collect()
}

/// Copy of `image` with every occluded pixel replaced by `fill`.
pub fn apply_mask(
    image: &RasterImage,
    mask: &OcclusionMask,
    fill: FillColor,
) -> Result<RasterImage> {
    if image.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            image: image.dimensions(),
            mask: mask.dimensions(),
        });
    }
    let mut out = image.clone();
    let rgb = fill.rgb();
    for (px, &occluded) in out.data.chunks_exact_mut(3).zip(mask.as_slice()) {
        if occluded {
            px.copy_from_slice(&rgb);
        }
    }
    Ok(out)
}

/// Writes `image` to `path`, creating parent directories. Only PNG is accepted.
pub fn write_image(image: &RasterImage, path: &Path, format: OutputFormat) -> Result<()> {
    if format != OutputFormat::Png {
        return Err(Error::FormatPolicy(format!(
            "{format:?} requested for {}",
            path.display()
        )));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    image::save_buffer_with_format(
        path,
        &image.data,
        image.width,
        image.height,
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .map_err(|e| encode_error(path, e))
}
