//! Mean absolute boundary distance (MAD) and per-subject spread.
//!
//! MAD for one surface is the mean of `|pred - gt|` over every
//! `(slice, column)` where both are labeled, multiplied by the axial
//! resolution, so the unit is micrometres.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::SurfaceSet;

/// How a subject's overall MAD combines its per-surface values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Plain mean over surfaces.
    #[default]
    Unweighted,
    /// Mean over all evaluated columns, pooled across surfaces.
    ByColumns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadReport {
    /// MAD per surface in micrometres; `None` when a surface had no
    /// evaluable column.
    pub per_surface: Vec<Option<f64>>,
    pub overall: f64,
    pub columns_evaluated: usize,
    pub columns_skipped: usize,
    /// Evaluated columns per surface.
    pub per_surface_columns: Vec<usize>,
}

pub fn mad(pred: &SurfaceSet, gt: &SurfaceSet, resolution_um_per_px: f64) -> Result<MadReport> {
    mad_weighted(pred, gt, resolution_um_per_px, Weighting::Unweighted)
}

pub fn mad_weighted(
    pred: &SurfaceSet,
    gt: &SurfaceSet,
    resolution_um_per_px: f64,
    weighting: Weighting,
) -> Result<MadReport> {
    if pred.slice_count() != gt.slice_count()
        || pred.surface_count() != gt.surface_count()
        || pred.cols() != gt.cols()
    {
        return Err(Error::dims(format!(
            "prediction is {}x{}x{}, ground truth is {}x{}x{}",
            pred.slice_count(),
            pred.surface_count(),
            pred.cols(),
            gt.slice_count(),
            gt.surface_count(),
            gt.cols()
        )));
    }
    if !(resolution_um_per_px > 0.0 && resolution_um_per_px.is_finite()) {
        return Err(Error::InvalidValue(format!(
            "resolution must be positive, got {resolution_um_per_px}"
        )));
    }
    let surfaces = gt.surface_count();
    let mut sums = vec![0.0f64; surfaces];
    let mut counts = vec![0usize; surfaces];
    let mut skipped = 0usize;
    for s in 0..gt.slice_count() {
        for b in 0..surfaces {
            for (p, g) in pred.line(s, b).iter().zip(gt.line(s, b)) {
                match (p, g) {
                    (Some(p), Some(g)) => {
                        sums[b] += (p - g).abs();
                        counts[b] += 1;
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    let per_surface: Vec<Option<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(&sum, &n)| (n > 0).then(|| resolution_um_per_px * (sum / n as f64)))
        .collect();
    let evaluated: usize = counts.iter().sum();
    if evaluated == 0 {
        return Err(Error::NoValidColumns(0));
    }
    let overall = match weighting {
        Weighting::Unweighted => {
            let present: Vec<f64> = per_surface.iter().flatten().copied().collect();
            mean_of(&present)
        }
        Weighting::ByColumns => resolution_um_per_px * (sums.iter().sum::<f64>() / evaluated as f64),
    };
    Ok(MadReport {
        per_surface,
        overall,
        columns_evaluated: evaluated,
        columns_skipped: skipped,
        per_surface_columns: counts,
    })
}

/// Mean computed about the first value, so a list of equal values has
/// exactly that value as its mean.
fn mean_of(values: &[f64]) -> f64 {
    let x0 = values[0];
    x0 + values.iter().map(|v| v - x0).sum::<f64>() / values.len() as f64
}

/// Standard deviation of per-subject MADs.
pub fn subject_sd(per_subject_mad: &[f64], kind: SdKind) -> Result<f64> {
    let n = per_subject_mad.len();
    if n == 0 {
        return Err(Error::EmptyList);
    }
    let divisor = match kind {
        SdKind::Population => n as f64,
        SdKind::Sample if n < 2 => return Ok(0.0),
        SdKind::Sample => (n - 1) as f64,
    };
    let mean = mean_of(per_subject_mad);
    let ss: f64 = per_subject_mad.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((ss / divisor).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub weighting: Weighting,
    pub sd: SdKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectResult {
    pub subject: String,
    pub report: MadReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub resolution_um_per_px: f64,
    pub surface_names: Vec<String>,
    pub subjects: Vec<SubjectResult>,
    /// Mean over subjects of each surface's MAD (subjects lacking the
    /// surface are left out).
    pub per_surface_mean: Vec<Option<f64>>,
    pub mean: f64,
    pub sd: f64,
}

impl RunReport {
    /// `mean±sd` with two decimals.
    pub fn summary(&self) -> String {
        format!("{:.2}±{:.2}", self.mean, self.sd)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "resolution: {} um/px", self.resolution_um_per_px);
        let _ = write!(out, "{:<16}", "subject");
        for name in &self.surface_names {
            let _ = write!(out, " {name:>8}");
        }
        let _ = writeln!(out, " {:>8}", "overall");
        for s in &self.subjects {
            let _ = write!(out, "{:<16}", s.subject);
            for v in &s.report.per_surface {
                match v {
                    Some(v) => {
                        let _ = write!(out, " {v:>8.2}");
                    }
                    None => {
                        let _ = write!(out, " {:>8}", "-");
                    }
                }
            }
            let _ = writeln!(out, " {:>8.2}", s.report.overall);
        }
        let _ = writeln!(out, "MAD (um): {}", self.summary());
        out
    }
}

/// Evaluates matching subjects and aggregates mean and SD over subjects.
pub fn evaluate_run(
    pred: &BTreeMap<String, SurfaceSet>,
    gt: &BTreeMap<String, SurfaceSet>,
    resolution_um_per_px: f64,
    options: EvalOptions,
) -> Result<RunReport> {
    let missing: Vec<&str> = gt
        .keys()
        .filter(|k| !pred.contains_key(*k))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = pred
        .keys()
        .filter(|k| !gt.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::SubjectMismatch(format!(
            "missing from prediction: {missing:?}; not in ground truth: {extra:?}"
        )));
    }
    if gt.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut subjects = Vec::with_capacity(gt.len());
    for (id, g) in gt {
        let report = mad_weighted(&pred[id], g, resolution_um_per_px, options.weighting)?;
        subjects.push(SubjectResult {
            subject: id.clone(),
            report,
        });
    }
    let overall: Vec<f64> = subjects.iter().map(|s| s.report.overall).collect();
    let mean = mean_of(&overall);
    let sd = subject_sd(&overall, options.sd)?;
    let surface_count = subjects[0].report.per_surface.len();
    let per_surface_mean = (0..surface_count)
        .map(|b| {
            let vals: Vec<f64> = subjects.iter().filter_map(|s| s.report.per_surface[b]).collect();
            (!vals.is_empty()).then(|| mean_of(&vals))
        })
        .collect();
    let surface_names = gt.values().next().map(|g| g.names().to_vec()).unwrap_or_default();
    Ok(RunReport {
        resolution_um_per_px,
        surface_names,
        subjects,
        per_surface_mean,
        mean,
        sd,
    })
}
