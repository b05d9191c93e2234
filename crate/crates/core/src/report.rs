//! Tabular renderings of robustness reports.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mask::OcclusionKind;
use crate::metrics::RobustnessReport;

/// Column order of the markdown table: dispersed kinds first, then contiguous.
pub const TABLE_ORDER: [OcclusionKind; 5] = [
    OcclusionKind::Snow,
    OcclusionKind::Rain,
    OcclusionKind::Slide,
    OcclusionKind::Bars,
    OcclusionKind::Grid,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format {other:?} (expected md or csv)"
            ))),
        }
    }
}

pub fn load_report(path: &Path) -> Result<RobustnessReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

pub fn save_report(report: &RobustnessReport, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn render(reports: &[RobustnessReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(reports),
        ReportFormat::Csv => render_csv(reports),
    }
}

fn percent(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

/// One row per model: Model, Acc., one NAUC column per kind, Average NAUC.
pub fn render_markdown(reports: &[RobustnessReport]) -> String {
    let kinds: Vec<OcclusionKind> = TABLE_ORDER
        .into_iter()
        .filter(|k| reports.iter().any(|r| r.score(*k).is_some()))
        .collect();
    let mut header = vec!["Model".to_string(), "Acc.".to_string()];
    header.extend(
        kinds
            .iter()
            .map(|k| format!("NAUC {}", capitalize(k.as_str()))),
    );
    header.push("Average NAUC".to_string());

    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in reports {
        let mut row = vec![r.model_id.replace('|', "\\|"), percent(r.a0)];
        row.extend(kinds.iter().map(|k| {
            r.score(*k)
                .map_or_else(|| "-".to_string(), |s| percent(s.nauc))
        }));
        row.push(percent(r.average_nauc));
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    chars
        .next()
        .map(|c| c.to_uppercase().chain(chars).collect())
        .unwrap_or_default()
}

/// Long form `model,kind,level,accuracy`, one row per curve point.
pub fn render_csv(reports: &[RobustnessReport]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let _ = writer.write_record(["model", "kind", "level", "accuracy"]);
    for r in reports {
        for score in &r.kinds {
            for (level, acc) in score.curve.levels.iter().zip(&score.curve.accuracy) {
                let _ = writer.write_record([
                    r.model_id.as_str(),
                    score.kind.as_str(),
                    &level.to_string(),
                    &acc.to_string(),
                ]);
            }
        }
    }
    String::from_utf8(writer.into_inner().unwrap_or_default()).unwrap_or_default()
}
