//! Dataset splitting, sweep generation, and evaluation of prediction files.

mod dataset;
mod evaluate;
mod sweep;

pub use dataset::{scan_dataset, split_dataset, DatasetImage, Split, SplitAssignment, SplitEntry};
pub use evaluate::{
    evaluate, evaluate_records, read_predictions, write_predictions, PREDICTIONS_HEADER,
};
pub use sweep::{
    artifact_path, generate_sweep, seed_derive, LevelRange, ManifestEntry, ManifestWarning,
    SweepConfig, SweepManifest, MANIFEST_FILE,
};
