//! Occlusion robustness benchmarking.
//!
//! Generates occluded copies of a labeled image set with five mask kinds
//! (slide, bars, rain, snow, grid) at exact pixel coverage, and scores a
//! classifier's predictions on them with per-level accuracy and NAUC.

pub mod checksum;
pub mod error;
pub mod harness;
pub mod imaging;
pub mod mask;
pub mod metrics;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use harness::{
    evaluate, generate_sweep, seed_derive, split_dataset, LevelRange, ManifestEntry,
    SplitAssignment, SweepConfig, SweepManifest,
};
pub use imaging::{
    apply_mask, load_image, resize, write_image, FillColor, OutputFormat, RasterImage,
};
pub use mask::{generate, target_pixels, KindParams, OcclusionKind, OcclusionMask, OcclusionSpec};
pub use metrics::{
    accuracy, average_nauc, build_curve, nauc, PredictionRecord, RobustnessCurve, RobustnessReport,
    SweepKind,
};
pub use report::ReportFormat;
