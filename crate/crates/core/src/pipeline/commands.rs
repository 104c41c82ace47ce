use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{generate_phantom, Dataset, Manifest, PhantomSpec, Role, SubjectEntry};
use crate::metrics::{evaluate_run, EvalOptions, RunReport};
use crate::rng::{rng_from_seed, stream_seed};
use crate::types::{validate_sample, Sample, SurfaceSet};

pub const EVAL_REPORT_FILE: &str = "mad_report.json";

/// Writes `samples` as a dataset under `dir` with standard file names.
pub fn dataset_from_samples(
    dir: impl AsRef<Path>,
    name: &str,
    samples: &[Sample],
    role: impl Fn(usize) -> Role,
) -> Result<Dataset> {
    let first = samples.first().ok_or(Error::EmptyList)?;
    let manifest = Manifest {
        format_version: 1,
        name: name.to_string(),
        axial_resolution_um: first.volume.axial_resolution,
        slices: first.slice_count(),
        rows: first.rows(),
        cols: first.cols(),
        surface_count: first.surfaces.surface_count(),
        surface_names: first.surfaces.names().to_vec(),
        subjects: samples
            .iter()
            .enumerate()
            .map(|(i, s)| SubjectEntry::standard(s.volume.subject_id.clone(), role(i)))
            .collect(),
    };
    Dataset::create(dir, &manifest, samples)
}

/// A phantom dataset: `subjects` phantoms sharing `phantom`, each with its
/// own noise seed and a jittered top row and curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhantomDatasetSpec {
    pub name: String,
    pub subjects: usize,
    pub seed: u64,
    /// Uniform jitter of the top boundary, in rows.
    pub top_jitter: f64,
    /// Relative jitter of the curvature.
    pub curvature_jitter: f64,
    pub phantom: PhantomSpec,
}

impl Default for PhantomDatasetSpec {
    fn default() -> Self {
        Self {
            name: "phantom".into(),
            subjects: 4,
            seed: 0,
            top_jitter: 10.0,
            curvature_jitter: 0.5,
            phantom: PhantomSpec::default(),
        }
    }
}

impl PhantomDatasetSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn subject_spec(&self, index: usize) -> PhantomSpec {
        let seed = stream_seed(self.seed, index as u64);
        let mut rng = rng_from_seed(seed);
        let dt = self.top_jitter.abs();
        let dc = self.curvature_jitter.abs();
        let top = self.phantom.top + if dt > 0.0 { rng.gen_range(-dt..=dt) } else { 0.0 };
        let curvature = self.phantom.curvature * if dc > 0.0 { rng.gen_range(1.0 - dc..=1.0 + dc) } else { 1.0 };
        PhantomSpec {
            top,
            curvature,
            seed,
            subject_id: format!("{}_{index:02}", self.name),
            ..self.phantom.clone()
        }
    }

    fn role(&self, index: usize) -> Role {
        match self.subjects {
            n if n >= 3 && index == n - 1 => Role::Test,
            n if n >= 3 && index == n - 2 => Role::Val,
            _ => Role::Train,
        }
    }
}

pub fn run_gen_phantom(spec: &PhantomDatasetSpec, out: impl AsRef<Path>) -> Result<Dataset> {
    if spec.subjects == 0 {
        return Err(Error::InfeasibleSpec("subjects must be at least 1".into()));
    }
    let samples = (0..spec.subjects)
        .map(|i| generate_phantom(&spec.subject_spec(i)))
        .collect::<Result<Vec<_>>>()?;
    dataset_from_samples(out, &spec.name, &samples, |i| spec.role(i))
}

/// Surfaces of every subject, keyed by subject id.
pub fn load_surface_map(dataset: &Dataset) -> Result<BTreeMap<String, SurfaceSet>> {
    (0..dataset.len())
        .map(|i| Ok((dataset.manifest.subjects[i].id.clone(), dataset.load_surfaces(i)?)))
        .collect()
}

/// Evaluates predictions against ground truth. The JSON report goes to
/// `out`, or to `mad_report.json` in the prediction directory.
pub fn run_eval(
    pred: impl AsRef<Path>,
    gt: impl AsRef<Path>,
    resolution_um_per_px: f64,
    options: EvalOptions,
    out: Option<&Path>,
) -> Result<(RunReport, PathBuf)> {
    if !(resolution_um_per_px > 0.0 && resolution_um_per_px.is_finite()) {
        return Err(Error::InvalidValue(format!(
            "resolution must be positive, got {resolution_um_per_px}"
        )));
    }
    let pred_ds = Dataset::open(pred.as_ref())?;
    let gt_ds = Dataset::open(gt.as_ref())?;
    let report = evaluate_run(
        &load_surface_map(&pred_ds)?,
        &load_surface_map(&gt_ds)?,
        resolution_um_per_px,
        options,
    )?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| pred_ds.root.join(EVAL_REPORT_FILE));
    let mut text = serde_json::to_string_pretty(&report).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok((report, path))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub samples: usize,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Loads every sample of a dataset and checks it against the manifest and
/// the label invariants. Unreadable files are reported, not raised.
pub fn run_validate(dir: impl AsRef<Path>) -> Result<ValidationReport> {
    let ds = Dataset::open(dir.as_ref())?;
    let mut report = ValidationReport::default();
    for (i, entry) in ds.manifest.subjects.iter().enumerate() {
        report.samples += 1;
        let sample = match ds.load_sample(i) {
            Ok(s) => s,
            Err(e) => {
                report.problems.push(format!("{}: {}: {e}", entry.id, e.name()));
                continue;
            }
        };
        if sample.volume.axial_resolution != ds.manifest.axial_resolution_um {
            report.problems.push(format!(
                "{}: volume resolution {} differs from manifest {}",
                entry.id, sample.volume.axial_resolution, ds.manifest.axial_resolution_um
            ));
        }
        if sample.volume.subject_id != entry.id {
            report.problems.push(format!(
                "{}: volume carries subject id {:?}",
                entry.id, sample.volume.subject_id
            ));
        }
        if sample.surfaces.names() != ds.manifest.surface_names.as_slice() {
            report
                .problems
                .push(format!("{}: surface names differ from manifest", entry.id));
        }
        for v in validate_sample(&sample) {
            report.problems.push(format!("{}: {v}", entry.id));
        }
        if let Some(mask) = &entry.mask {
            if !ds.path_of(mask).is_file() {
                report.problems.push(format!("{}: mask file {mask} is missing", entry.id));
            }
        }
    }
    Ok(report)
}
