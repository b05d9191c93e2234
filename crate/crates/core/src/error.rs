use std::path::PathBuf;

use crate::mask::OcclusionKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid occlusion spec: {0}")]
    InvalidSpec(String),

    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),

    #[error("invalid dimensions {width}x{height}")]
    InvalidDims { width: u32, height: u32 },

    #[error("dimension mismatch: image is {image:?}, mask is {mask:?}")]
    DimensionMismatch { image: (u32, u32), mask: (u32, u32) },

    #[error("{0}: occluded artifacts are written as PNG only")]
    FormatPolicy(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {}: {source}", path.display())]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("cannot encode {}: {source}", path.display())]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("curve for {kind} is missing levels {levels:?}")]
    MissingLevels {
        kind: OcclusionKind,
        levels: Vec<u32>,
    },

    #[error("levels must be strictly ascending, start at 0 and be uniformly spaced: {0:?}")]
    NonUniformSpacing(Vec<u32>),

    #[error("curve needs at least 2 levels, got {0}")]
    DegenerateCurve(usize),

    #[error("clean accuracy A0 is zero; NAUC is undefined")]
    ZeroBaseline,

    #[error("class {class:?} has {count} images, at least {required} are needed")]
    InsufficientImages {
        class: String,
        count: usize,
        required: usize,
    },

    #[error("duplicate image id {0:?}")]
    DuplicateImageId(String),

    #[error("predictions do not cover {} manifest cell(s): {}", missing.len(), format_cells(missing))]
    Coverage { missing: Vec<(String, u32)> },

    #[error("prediction references unknown image id {0:?}")]
    UnknownImageId(String),

    #[error("duplicate prediction for ({image_id}, {kind}, {level})")]
    DuplicatePrediction {
        image_id: String,
        kind: String,
        level: u32,
    },

    #[error("parse error in {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// True for failures caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Encode { .. })
    }
}

fn format_cells(cells: &[(String, u32)]) -> String {
    cells
        .iter()
        .map(|(kind, level)| format!("{kind}@{level}"))
        .collect::<Vec<_>>()
        .join(", ")
}
