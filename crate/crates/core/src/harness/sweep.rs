use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{scan_dataset, DatasetImage};
use crate::checksum::fnv1a64;
use crate::error::{Error, Result};
use crate::imaging::{
    apply_mask, load_image, resize, write_image, FillColor, OutputFormat, RasterImage,
};
use crate::mask::{generate, KindParams, OcclusionKind, OcclusionSpec};
use crate::metrics::SweepKind;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// Seed for one artifact: FNV-1a over the UTF-8 text `master|image_id|kind|level`.
pub fn seed_derive(master_seed: u64, image_id: &str, kind: SweepKind, level: u32) -> u64 {
    fnv1a64(format!("{master_seed}|{image_id}|{kind}|{level}").as_bytes())
}

/// Inclusive level range in percent, written `start:end:step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRange {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl Default for LevelRange {
    fn default() -> Self {
        Self {
            start: 0,
            end: 100,
            step: 5,
        }
    }
}

impl LevelRange {
    pub fn validate(&self) -> Result<()> {
        if self.start != 0 || self.step == 0 || self.end > 100 {
            return Err(Error::InvalidConfig(format!(
                "levels must start at 0, stay within 100 and use a positive step, got {self}"
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> Vec<u32> {
        (self.start..=self.end)
            .step_by(self.step.max(1) as usize)
            .collect()
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

impl FromStr for LevelRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(':').map(|p| p.trim().parse::<u32>()).collect();
        let range = match parts.as_slice() {
            [Ok(start), Ok(end), Ok(step)] => LevelRange {
                start: *start,
                end: *end,
                step: *step,
            },
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "levels must look like start:end:step, got {s:?}"
                )))
            }
        };
        range.validate()?;
        Ok(range)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub kinds: Vec<OcclusionKind>,
    pub levels: LevelRange,
    /// Square evaluation resolution; images are resized before occlusion.
    pub resolution: u32,
    pub master_seed: u64,
    pub fill: FillColor,
    pub params: KindParams,
}

impl SweepConfig {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            kinds: OcclusionKind::ALL.to_vec(),
            levels: LevelRange::default(),
            resolution: 224,
            master_seed: 42,
            fill: FillColor::GRAY,
            params: KindParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one occlusion kind is required".into(),
            ));
        }
        let unique: BTreeSet<_> = self.kinds.iter().collect();
        if unique.len() != self.kinds.len() {
            return Err(Error::InvalidConfig(format!(
                "duplicate kinds in {:?}",
                self.kinds
            )));
        }
        if self.resolution == 0 {
            return Err(Error::InvalidConfig("resolution must be >= 1".into()));
        }
        self.levels.validate()?;
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub class_label: String,
    pub kind: SweepKind,
    pub level_percent: u32,
    pub source_path: String,
    /// Relative to the manifest's directory, `/`-separated.
    pub output_path: String,
    pub per_image_seed: u64,
    /// FNV-1a over the artifact's decoded RGB bytes.
    pub pixel_checksum: u64,
}

impl ManifestEntry {
    fn sort_key(&self) -> (&str, &str, SweepKind, u32) {
        (
            &self.class_label,
            &self.image_id,
            self.kind,
            self.level_percent,
        )
    }
}

/// A source image the sweep skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestWarning {
    pub warning: String,
    pub source_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ManifestLine {
    Entry(ManifestEntry),
    Warning(ManifestWarning),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepManifest {
    pub entries: Vec<ManifestEntry>,
    pub warnings: Vec<ManifestWarning>,
}

impl SweepManifest {
    /// One JSON object per line: artifacts in canonical order, then warnings.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let lines = self
            .entries
            .iter()
            .map(serde_json::to_string)
            .chain(self.warnings.iter().map(serde_json::to_string));
        for line in lines {
            let line = line.map_err(|e| Error::parse(path, e))?;
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Streaming parse; blank lines and unknown fields are ignored.
    pub fn read_jsonl(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = SweepManifest::default();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, format!("line {}: {e}", n + 1)))?
            {
                ManifestLine::Entry(e) => manifest.entries.push(e),
                ManifestLine::Warning(w) => manifest.warnings.push(w),
            }
        }
        Ok(manifest)
    }

    pub fn kinds(&self) -> Vec<OcclusionKind> {
        let kinds: BTreeSet<_> = self
            .entries
            .iter()
            .filter_map(|e| match e.kind {
                SweepKind::Occluded(k) => Some(k),
                SweepKind::None => None,
            })
            .collect();
        kinds.into_iter().collect()
    }

    pub fn levels(&self) -> Vec<u32> {
        let levels: BTreeSet<_> = self.entries.iter().map(|e| e.level_percent).collect();
        levels.into_iter().collect()
    }
}

/// `<kind>/<level:03>/<class>/<image_id>.png`
pub fn artifact_path(kind: SweepKind, level: u32, class: &str, image_id: &str) -> String {
    format!("{kind}/{level:03}/{class}/{image_id}.png")
}

/// Writes every occluded artifact plus `manifest.jsonl` under `config.output_dir`.
///
/// Level 0 is written once per image under the pseudo-kind `none`. Images
/// are processed in parallel; the manifest order is canonical regardless.
/// Undecodable sources become warning lines instead of aborting the run.
pub fn generate_sweep(config: &SweepConfig) -> Result<SweepManifest> {
    config.validate()?;
    let images = scan_dataset(&config.input_dir)?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;

    let results: Vec<Result<std::result::Result<Vec<ManifestEntry>, ManifestWarning>>> = images
        .par_iter()
        .map(|image| sweep_image(config, image))
        .collect();

    let mut manifest = SweepManifest::default();
    for result in results {
        match result? {
            Ok(entries) => manifest.entries.extend(entries),
            Err(warning) => manifest.warnings.push(warning),
        }
    }
    manifest
        .entries
        .sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    manifest.write_jsonl(&config.output_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

fn sweep_image(
    config: &SweepConfig,
    image: &DatasetImage,
) -> Result<std::result::Result<Vec<ManifestEntry>, ManifestWarning>> {
    let source = match load_image(&image.path) {
        Ok(img) => img,
        Err(e @ Error::Decode { .. }) => {
            return Ok(Err(ManifestWarning {
                warning: e.to_string(),
                source_path: image.path.display().to_string(),
            }))
        }
        Err(e) => return Err(e),
    };
    let size = config.resolution;
    let clean = resize(&source, size, size)?;

    let mut entries = Vec::new();
    let mut emit = |kind: SweepKind, level: u32, seed: u64, raster: &RasterImage| -> Result<()> {
        let rel = artifact_path(kind, level, &image.class, &image.image_id);
        write_image(raster, &config.output_dir.join(&rel), OutputFormat::Png)?;
        entries.push(ManifestEntry {
            image_id: image.image_id.clone(),
            class_label: image.class.clone(),
            kind,
            level_percent: level,
            source_path: image.path.display().to_string(),
            output_path: rel,
            per_image_seed: seed,
            pixel_checksum: raster.checksum(),
        });
        Ok(())
    };

    let seed = seed_derive(config.master_seed, &image.image_id, SweepKind::None, 0);
    emit(SweepKind::None, 0, seed, &clean)?;
    for &kind in &config.kinds {
        for level in config.levels.levels().into_iter().filter(|&l| l > 0) {
            let sweep_kind = SweepKind::Occluded(kind);
            let seed = seed_derive(config.master_seed, &image.image_id, sweep_kind, level);
            let spec = OcclusionSpec::new(kind, f64::from(level) / 100.0, size, size, seed)
                .with_params(config.params.clone());
            let occluded = apply_mask(&clean, &generate(&spec)?, config.fill)?;
            emit(sweep_kind, level, seed, &occluded)?;
        }
    }
    Ok(Ok(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_derive_is_fnv_of_joined_fields() {
        let kind = SweepKind::Occluded(OcclusionKind::Snow);
        assert_eq!(
            seed_derive(42, "img_001", kind, 5),
            fnv1a64(b"42|img_001|snow|5")
        );
        assert_eq!(
            seed_derive(42, "img_001", kind, 5),
            seed_derive(42, "img_001", kind, 5)
        );
    }

    #[test]
    fn seed_derive_has_no_collisions_on_corpus() {
        let mut seeds = BTreeSet::new();
        let mut count = 0;
        for master in [0u64, 1, 42, u64::MAX] {
            for id in 0..30 {
                let id = format!("img{id:03}");
                for kind in std::iter::once(SweepKind::None)
                    .chain(OcclusionKind::ALL.into_iter().map(SweepKind::Occluded))
                {
                    for level in (0..=100).step_by(5) {
                        seeds.insert(seed_derive(master, &id, kind, level));
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(seeds.len(), count);
    }

    #[test]
    fn level_range_parsing() {
        let r: LevelRange = "0:100:5".parse().unwrap();
        assert_eq!(r, LevelRange::default());
        assert_eq!(r.levels().len(), 21);
        assert_eq!(
            "0:50:25".parse::<LevelRange>().unwrap().levels(),
            vec![0, 25, 50]
        );
        for bad in ["5:100:5", "0:100:0", "0:120:5", "0:100", "a:b:c"] {
            assert!(bad.parse::<LevelRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::new("in", "out");
        assert!(c.validate().is_ok());
        c.kinds.clear();
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.kinds = vec![OcclusionKind::Rain, OcclusionKind::Rain];
        assert!(c.validate().is_err());
    }

    #[test]
    fn artifact_path_layout() {
        assert_eq!(
            artifact_path(OcclusionKind::Grid.into(), 5, "t72", "img_7"),
            "grid/005/t72/img_7.png"
        );
        assert_eq!(
            artifact_path(SweepKind::None, 0, "t72", "a"),
            "none/000/t72/a.png"
        );
        assert_eq!(
            artifact_path(OcclusionKind::Rain.into(), 100, "c", "a"),
            "rain/100/c/a.png"
        );
    }

    #[test]
    fn manifest_lines_round_trip_with_warnings() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = SweepManifest {
            entries: vec![ManifestEntry {
                image_id: "a".into(),
                class_label: "c".into(),
                kind: OcclusionKind::Bars.into(),
                level_percent: 35,
                source_path: "in/c/a.png".into(),
                output_path: "bars/035/c/a.png".into(),
                per_image_seed: u64::MAX,
                pixel_checksum: 0xcbf2_9ce4_8422_2325,
            }],
            warnings: vec![ManifestWarning {
                warning: "cannot decode".into(),
                source_path: "in/c/b.jpg".into(),
            }],
        };
        let path = dir.path().join(MANIFEST_FILE);
        manifest.write_jsonl(&path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("\n\n");
        std::fs::write(&path, text).unwrap();
        assert_eq!(SweepManifest::read_jsonl(&path).unwrap(), manifest);

        std::fs::write(&path, "{\"image_id\": 3}\n").unwrap();
        assert!(matches!(
            SweepManifest::read_jsonl(&path),
            Err(Error::Parse { .. })
        ));
    }
}
