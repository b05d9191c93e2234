//! Accuracy per occlusion level and the normalized area under the accuracy curve.
//!
//! For accuracies `A_0 .. A_{n-1}` at uniformly spaced levels,
//!
//! ```text
//! NAUC = (1 / A_0) * (1 / (n - 1)) * sum_{i=0}^{n-2} (A_i + A_{i+1}) / 2
//! ```
//!
//! i.e. the trapezoidal mean of the curve over its `n - 1` intervals, divided
//! by clean accuracy. 1.0 means occlusion never hurt; values above 1 are legal
//! and reported as-is.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::OcclusionKind;

/// Occlusion tag on a prediction: a real kind, or the shared clean level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SweepKind {
    None,
    Occluded(OcclusionKind),
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::None => "none",
            SweepKind::Occluded(k) => k.as_str(),
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            Ok(SweepKind::None)
        } else {
            s.parse().map(SweepKind::Occluded)
        }
    }
}

impl From<OcclusionKind> for SweepKind {
    fn from(k: OcclusionKind) -> Self {
        SweepKind::Occluded(k)
    }
}

impl Serialize for SweepKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SweepKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub image_id: String,
    pub true_label: String,
    pub pred_label: String,
    pub kind: SweepKind,
    pub level_percent: u32,
}

impl PredictionRecord {
    pub fn is_correct(&self) -> bool {
        canonical_label(&self.true_label) == canonical_label(&self.pred_label)
    }
}

/// Labels compare after trimming whitespace and case folding.
pub fn canonical_label(label: &str) -> String {
    label.trim().to_lowercase()
}

pub fn accuracy<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let (correct, total) = records.into_iter().fold((0usize, 0usize), |(c, t), r| {
        (c + usize::from(r.is_correct()), t + 1)
    });
    if total == 0 {
        return Err(Error::EmptyInput("accuracy needs at least one record"));
    }
    Ok(correct as f64 / total as f64)
}

/// Checks that `levels` start at 0, ascend strictly, and are uniformly spaced.
pub fn check_levels(levels: &[u32]) -> Result<()> {
    let uniform = match levels {
        [] => true,
        [first, rest @ ..] => {
            let step = rest.first().map(|s| s.wrapping_sub(*first));
            *first == 0
                && levels
                    .windows(2)
                    .all(|p| p[1] > p[0] && Some(p[1] - p[0]) == step)
        }
    };
    if uniform {
        Ok(())
    } else {
        Err(Error::NonUniformSpacing(levels.to_vec()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCurve {
    pub kind: OcclusionKind,
    pub levels: Vec<u32>,
    pub accuracy: Vec<f64>,
    pub sample_count: Vec<usize>,
}

impl RobustnessCurve {
    pub fn new(
        kind: OcclusionKind,
        levels: Vec<u32>,
        accuracy: Vec<f64>,
        sample_count: Vec<usize>,
    ) -> Result<Self> {
        check_levels(&levels)?;
        if accuracy.len() != levels.len() || sample_count.len() != levels.len() {
            return Err(Error::InvalidConfig(format!(
                "curve has {} levels but {} accuracies and {} counts",
                levels.len(),
                accuracy.len(),
                sample_count.len()
            )));
        }
        if let Some(a) = accuracy.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidConfig(format!("accuracy {a} outside [0, 1]")));
        }
        Ok(Self {
            kind,
            levels,
            accuracy,
            sample_count,
        })
    }

    /// Clean accuracy, the first point of the curve.
    pub fn baseline(&self) -> Option<f64> {
        self.accuracy.first().copied()
    }
}

/// Per-level accuracy for `kind`.
///
/// Level 0 uses records tagged `none` (shared clean predictions) together
/// with any level-0 records tagged `kind`; other levels use only records of
/// `kind`.
pub fn build_curve(
    records: &[PredictionRecord],
    kind: OcclusionKind,
    expected_levels: &[u32],
) -> Result<RobustnessCurve> {
    check_levels(expected_levels)?;
    let mut accuracy = Vec::with_capacity(expected_levels.len());
    let mut counts = Vec::with_capacity(expected_levels.len());
    let mut missing = Vec::new();
    for &level in expected_levels {
        let at_level: Vec<&PredictionRecord> = records
            .iter()
            .filter(|r| {
                r.level_percent == level
                    && (r.kind == SweepKind::Occluded(kind)
                        || (level == 0 && r.kind == SweepKind::None))
            })
            .collect();
        if at_level.is_empty() {
            missing.push(level);
            continue;
        }
        counts.push(at_level.len());
        accuracy.push(crate::metrics::accuracy(at_level)?);
    }
    if !missing.is_empty() {
        return Err(Error::MissingLevels {
            kind,
            levels: missing,
        });
    }
    RobustnessCurve::new(kind, expected_levels.to_vec(), accuracy, counts)
}

/// Normalized area under the accuracy curve (see module docs).
pub fn nauc(curve: &RobustnessCurve) -> Result<f64> {
    check_levels(&curve.levels)?;
    nauc_of(&curve.accuracy)
}

/// NAUC of a bare accuracy sequence at uniformly spaced levels.
pub fn nauc_of(accuracy: &[f64]) -> Result<f64> {
    if accuracy.len() < 2 {
        return Err(Error::DegenerateCurve(accuracy.len()));
    }
    let a0 = accuracy[0];
    if a0 == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    let intervals = (accuracy.len() - 1) as f64;
    let area: f64 = accuracy.windows(2).map(|p| (p[0] + p[1]) / 2.0).sum();
    Ok(area / intervals / a0)
}

pub fn average_nauc(per_kind: &[f64]) -> Result<f64> {
    if per_kind.is_empty() {
        return Err(Error::EmptyInput("average NAUC needs at least one kind"));
    }
    Ok(per_kind.iter().sum::<f64>() / per_kind.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindScore {
    pub kind: OcclusionKind,
    pub a0: f64,
    pub nauc: f64,
    pub curve: RobustnessCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub model_id: String,
    /// Clean accuracy from the shared level-0 predictions.
    pub a0: f64,
    pub kinds: Vec<KindScore>,
    pub average_nauc: f64,
}

impl RobustnessReport {
    /// Scores every kind in `kinds` over `levels` and averages the NAUCs.
    pub fn from_records(
        model_id: impl Into<String>,
        records: &[PredictionRecord],
        kinds: &[OcclusionKind],
        levels: &[u32],
    ) -> Result<Self> {
        let mut scores = Vec::with_capacity(kinds.len());
        for &kind in kinds {
            let curve = build_curve(records, kind, levels)?;
            let nauc = nauc(&curve)?;
            scores.push(KindScore {
                kind,
                a0: curve.accuracy[0],
                nauc,
                curve,
            });
        }
        let average = average_nauc(&scores.iter().map(|s| s.nauc).collect::<Vec<_>>())?;
        let a0 = scores[0].a0;
        Ok(Self {
            model_id: model_id.into(),
            a0,
            kinds: scores,
            average_nauc: average,
        })
    }

    pub fn score(&self, kind: OcclusionKind) -> Option<&KindScore> {
        self.kinds.iter().find(|s| s.kind == kind)
    }
}
