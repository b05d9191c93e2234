use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use super::sweep::SweepManifest;
use crate::error::{Error, Result};
use crate::metrics::{PredictionRecord, RobustnessReport, SweepKind};

/// Exact header line of a predictions CSV.
pub const PREDICTIONS_HEADER: [&str; 5] = ["image_id", "kind", "level", "true_label", "pred_label"];

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(PREDICTIONS_HEADER) {
        return Err(Error::parse(
            path,
            format!(
                "header must be {:?}, got {:?}",
                PREDICTIONS_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or_default();
        let kind: SweepKind = field(1)
            .parse()
            .map_err(|e| Error::parse(path, format!("line {line}: {e}")))?;
        let level_percent = field(2)
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, format!("line {line}: bad level {:?}", field(2))))?;
        records.push(PredictionRecord {
            image_id: field(0).to_string(),
            kind,
            level_percent,
            true_label: field(3).to_string(),
            pred_label: field(4).to_string(),
        });
    }
    Ok(records)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::parse(path, format!("{other:?}")),
        }
    } else {
        Error::parse(path, e)
    }
}

/// Writes records under [`PREDICTIONS_HEADER`] with LF line endings.
pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    writer
        .write_record(PREDICTIONS_HEADER)
        .map_err(|e| csv_error(path, e))?;
    for r in records {
        let level = r.level_percent.to_string();
        writer
            .write_record([
                r.image_id.as_str(),
                r.kind.as_str(),
                &level,
                &r.true_label,
                &r.pred_label,
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Scores predictions against the cells a manifest enumerates.
///
/// Every manifest cell (image, kind, level) needs exactly one prediction.
/// Predictions for cells the manifest does not list are ignored unless their
/// image id is unknown altogether.
pub fn evaluate_records(
    manifest: &SweepManifest,
    predictions: &[PredictionRecord],
    model_id: &str,
) -> Result<RobustnessReport> {
    let known_ids: HashSet<&str> = manifest
        .entries
        .iter()
        .map(|e| e.image_id.as_str())
        .collect();
    let mut by_cell: HashMap<(&str, SweepKind, u32), &PredictionRecord> = HashMap::new();
    for p in predictions {
        if !known_ids.contains(p.image_id.as_str()) {
            return Err(Error::UnknownImageId(p.image_id.clone()));
        }
        if by_cell
            .insert((p.image_id.as_str(), p.kind, p.level_percent), p)
            .is_some()
        {
            return Err(Error::DuplicatePrediction {
                image_id: p.image_id.clone(),
                kind: p.kind.to_string(),
                level: p.level_percent,
            });
        }
    }

    let mut covered = Vec::with_capacity(manifest.entries.len());
    let mut missing = BTreeSet::new();
    for e in &manifest.entries {
        match by_cell.get(&(e.image_id.as_str(), e.kind, e.level_percent)) {
            Some(p) => covered.push((*p).clone()),
            None => {
                missing.insert((e.kind, e.level_percent));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage {
            missing: missing
                .into_iter()
                .map(|(k, l)| (k.to_string(), l))
                .collect(),
        });
    }
    let kinds = manifest.kinds();
    if kinds.is_empty() {
        return Err(Error::EmptyInput("manifest lists no occluded artifacts"));
    }
    RobustnessReport::from_records(model_id, &covered, &kinds, &manifest.levels())
}

pub fn evaluate(
    manifest_path: &Path,
    predictions_path: &Path,
    model_id: &str,
) -> Result<RobustnessReport> {
    let manifest = SweepManifest::read_jsonl(manifest_path)?;
    let predictions = read_predictions(predictions_path)?;
    evaluate_records(&manifest, &predictions, model_id)
}
