use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checksum::fnv1a64;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const TRAIN_PER_CLASS: usize = 16;
pub const VAL_PER_CLASS: usize = 4;

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// One source image found under `<input>/<class>/<image>.{png,jpg,jpeg}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetImage {
    pub class: String,
    /// File stem; must be unique across the whole input tree.
    pub image_id: String,
    pub path: PathBuf,
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

fn is_image(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Lists images class by class, both sorted by name.
pub fn scan_dataset(input_dir: &Path) -> Result<Vec<DatasetImage>> {
    let mut images = Vec::new();
    let mut seen = BTreeMap::new();
    for class_dir in sorted_entries(input_dir)?
        .into_iter()
        .filter(|p| p.is_dir())
    {
        let class = file_name(&class_dir);
        for path in sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| is_image(p))
        {
            let image_id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            if seen.insert(image_id.clone(), ()).is_some() {
                return Err(Error::DuplicateImageId(image_id));
            }
            images.push(DatasetImage {
                class: class.clone(),
                image_id,
                path,
            });
        }
    }
    Ok(images)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub image_id: String,
    pub class: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub entries: Vec<SplitEntry>,
}

impl SplitAssignment {
    pub fn get(&self, image_id: &str) -> Option<Split> {
        self.entries
            .iter()
            .find(|e| e.image_id == image_id)
            .map(|e| e.split)
    }

    pub fn count(&self, class: &str, split: Split) -> usize {
        self.entries
            .iter()
            .filter(|e| e.class == class && e.split == split)
            .count()
    }
}

/// Per class: seeded shuffle, first 16 to train, next 4 to val, the rest to test.
///
/// The shuffle for a class is seeded with FNV-1a of `"{seed}|{class}"`.
pub fn split_dataset(input_dir: &Path, seed: u64) -> Result<SplitAssignment> {
    let mut by_class: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for image in scan_dataset(input_dir)? {
        by_class
            .entry(image.class)
            .or_default()
            .push(image.image_id);
    }
    let required = TRAIN_PER_CLASS + VAL_PER_CLASS;
    let mut entries = Vec::new();
    for (class, mut ids) in by_class {
        if ids.len() < required {
            return Err(Error::InsufficientImages {
                class,
                count: ids.len(),
                required,
            });
        }
        SplitMix64::new(fnv1a64(format!("{seed}|{class}").as_bytes())).shuffle(&mut ids);
        for (i, image_id) in ids.into_iter().enumerate() {
            let split = match i {
                i if i < TRAIN_PER_CLASS => Split::Train,
                i if i < required => Split::Val,
                _ => Split::Test,
            };
            entries.push(SplitEntry {
                image_id,
                class: class.clone(),
                split,
            });
        }
    }
    Ok(SplitAssignment { seed, entries })
}
