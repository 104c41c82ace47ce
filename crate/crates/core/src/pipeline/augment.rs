use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AugKind, PipelineConfig};
use crate::baseline::{self, AffineParams, Rect};
use crate::error::{Error, Result};
use crate::fdda::{self, CoeffVector};
use crate::io::{Dataset, Manifest, MANIFEST_FILE};
use crate::prlc::{self, PrlcRecord};
use crate::rng::{substream, SeedScheme};
use crate::types::Sample;

pub const PROVENANCE_FILE: &str = "provenance.jsonl";

/// One applied augmentation with every drawn parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "aug", rename_all = "snake_case")]
pub enum Step {
    Flip,
    Vscale { factor: f64 },
    Fdda { coeffs: CoeffVector },
    /// `record` is `None` when no paste fit and the sample passed through.
    Prlc { record: Option<PrlcRecord> },
    Affine { params: AffineParams },
    Cutmix { partner: usize, rect: Rect },
}

impl Step {
    pub fn kind(&self) -> AugKind {
        match self {
            Step::Flip => AugKind::Flip,
            Step::Vscale { .. } => AugKind::Vscale,
            Step::Fdda { .. } => AugKind::Fdda,
            Step::Prlc { .. } => AugKind::Prlc,
            Step::Affine { .. } => AugKind::Affine,
            Step::Cutmix { .. } => AugKind::Cutmix,
        }
    }
}

/// One provenance line: the applied sequence for a `(epoch, sample)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceRecord {
    pub epoch: usize,
    pub index: usize,
    pub subject: String,
    pub sample_seed: u64,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output: PathBuf,
    pub records: Vec<ProvenanceRecord>,
}

impl RunSummary {
    pub fn applied_count(&self, kind: AugKind) -> usize {
        self.records
            .iter()
            .flat_map(|r| &r.steps)
            .filter(|s| s.kind() == kind)
            .count()
    }
}

pub fn epoch_dir(output: &Path, epoch: usize) -> PathBuf {
    output.join(format!("epoch_{epoch:03}"))
}

/// Coin flip for one augmentation: always exactly one `f64` draw.
fn coin<R: Rng + ?Sized>(rng: &mut R, probability: f64) -> bool {
    rng.gen::<f64>() < probability
}

/// Draws and applies the configured stack to one sample.
pub fn augment_sample(
    config: &PipelineConfig,
    dataset: &Dataset,
    input: &Sample,
    sample_seed: u64,
) -> Result<(Sample, Vec<Step>)> {
    let mut current = input.clone();
    let mut steps = Vec::new();
    for &kind in &config.order {
        let mut rng = substream(sample_seed, kind.stream_id());
        if !coin(&mut rng, config.probability(kind)) {
            continue;
        }
        let step = match kind {
            AugKind::Flip => Step::Flip,
            AugKind::Vscale => Step::Vscale {
                factor: config.vscale.range.sample(&mut rng),
            },
            AugKind::Fdda => Step::Fdda {
                coeffs: fdda::sample_coeffs(&config.fdda_ranges(), &current, &mut rng)?,
            },
            AugKind::Prlc => {
                let (out, record) = prlc::apply_prlc(&current, &config.prlc.params(), &mut rng)?;
                current = out;
                steps.push(Step::Prlc { record });
                continue;
            }
            AugKind::Affine => Step::Affine {
                params: config.affine.ranges().sample(current.rows(), current.cols(), &mut rng),
            },
            AugKind::Cutmix => Step::Cutmix {
                partner: rng.gen_range(0..dataset.len()),
                rect: Rect::sample(current.rows(), current.cols(), &mut rng),
            },
        };
        current = apply_step(&current, &step, dataset)?;
        steps.push(step);
    }
    Ok((current, steps))
}

/// Applies a recorded step. CutMix partners are read from `dataset`.
pub fn apply_step(sample: &Sample, step: &Step, dataset: &Dataset) -> Result<Sample> {
    match step {
        Step::Flip => Ok(baseline::horizontal_flip(sample)),
        Step::Vscale { factor } => baseline::vertical_scale(sample, *factor),
        Step::Fdda { coeffs } => fdda::apply_to_volume(sample, coeffs),
        Step::Prlc { record: None } => Ok(sample.clone()),
        Step::Prlc { record: Some(r) } => prlc::replay_prlc(sample, r),
        Step::Affine { params } => baseline::random_affine(sample, params),
        Step::Cutmix { partner, rect } => {
            if *partner >= dataset.len() {
                return Err(Error::InvalidValue(format!(
                    "cutmix partner {partner} outside dataset of {}",
                    dataset.len()
                )));
            }
            baseline::cutmix_with_rect(sample, &dataset.load_sample(*partner)?, *rect)
        }
    }
}

/// Rebuilds an augmented sample from its provenance record.
pub fn replay(dataset: &Dataset, record: &ProvenanceRecord) -> Result<Sample> {
    let mut current = dataset.load_sample(record.index)?;
    for step in &record.steps {
        current = apply_step(&current, step, dataset)?;
    }
    Ok(current)
}

pub fn read_provenance(path: impl AsRef<Path>) -> Result<Vec<ProvenanceRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

fn copy_file(from: &Path, to: &Path) -> Result<()> {
    fs::copy(from, to).map(|_| ()).map_err(|e| Error::io(from, e))
}

fn process(
    config: &PipelineConfig,
    dataset: &Dataset,
    scheme: SeedScheme,
    epoch: usize,
    index: usize,
) -> Result<ProvenanceRecord> {
    let entry = &dataset.manifest.subjects[index];
    let input = dataset.load_sample(index)?;
    let sample_seed = scheme.sample_seed(index as u64, epoch as u64);
    let (out, steps) = augment_sample(config, dataset, &input, sample_seed)?;
    let dir = epoch_dir(&config.output, epoch);
    Dataset::write_sample(&dir, entry, &out)?;
    if let Some(mask) = &entry.mask {
        copy_file(&dataset.path_of(mask), &dir.join(mask))?;
    }
    log::debug!("epoch {epoch} sample {index}: {} step(s)", steps.len());
    Ok(ProvenanceRecord {
        epoch,
        index,
        subject: entry.id.clone(),
        sample_seed,
        steps,
    })
}

fn ensure_parent_dirs(dir: &Path, manifest: &Manifest) -> Result<()> {
    for entry in &manifest.subjects {
        for rel in [Some(&entry.volume), Some(&entry.surfaces), entry.mask.as_ref()]
            .into_iter()
            .flatten()
        {
            if let Some(parent) = dir.join(rel).parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
    }
    Ok(())
}

/// Augments every sample for every epoch and writes
/// `output/epoch_NNN/` datasets plus `output/provenance.jsonl`.
pub fn run_augment(config: &PipelineConfig) -> Result<RunSummary> {
    config.check()?;
    if !config.input.is_dir() {
        return Err(Error::Config {
            path: config.input.clone(),
            reason: "input dataset directory does not exist".into(),
        });
    }
    let dataset = Dataset::open(&config.input)?;
    if dataset.is_empty() {
        return Err(Error::EmptyList);
    }
    for epoch in 0..config.epochs {
        let dir = epoch_dir(&config.output, epoch);
        ensure_parent_dirs(&dir, &dataset.manifest)?;
        let mut manifest = dataset.manifest.clone();
        manifest.name = format!("{}-epoch{epoch:03}", dataset.manifest.name);
        manifest.write(dir.join(MANIFEST_FILE))?;
    }

    let scheme = SeedScheme::new(config.seed);
    let jobs: Vec<(usize, usize)> = (0..config.epochs)
        .flat_map(|e| (0..dataset.len()).map(move |i| (e, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidValue(format!("worker pool: {e}")))?;
    log::info!(
        "augmenting {} sample(s) x {} epoch(s) on {} worker(s)",
        dataset.len(),
        config.epochs,
        pool.current_num_threads()
    );
    let records: Vec<ProvenanceRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(e, i)| process(config, &dataset, scheme, e, i))
            .collect::<Result<_>>()
    })?;

    let path = config.output.join(PROVENANCE_FILE);
    let mut text = Vec::new();
    for r in &records {
        serde_json::to_writer(&mut text, r).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        text.push(b'\n');
    }
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(&text).map_err(|e| Error::io(&path, e))?;
    Ok(RunSummary {
        output: config.output.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdda::{A0Policy, Interval};
    use crate::io::{generate_phantom, PhantomSpec, Role, SubjectEntry, MANIFEST_FILE};
    use crate::pipeline::dataset_from_samples;

    fn phantom_dataset(dir: &Path, n: usize) -> Dataset {
        let samples: Vec<Sample> = (0..n)
            .map(|i| {
                generate_phantom(&PhantomSpec {
                    seed: i as u64,
                    subject_id: format!("p{i}"),
                    top: 25.0 + i as f64,
                    ..PhantomSpec::small()
                })
                .unwrap()
            })
            .collect();
        dataset_from_samples(dir, "t", &samples, |_| Role::Train).unwrap()
    }

    fn config(input: &Path, output: &Path) -> PipelineConfig {
        let mut c = PipelineConfig::new(input, output);
        c.order = AugKind::ALL.to_vec();
        c.epochs = 2;
        c.seed = 7;
        c
    }

    #[test]
    fn zero_probability_copies_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let ds = phantom_dataset(&dir.path().join("in"), 2);
        let mut c = config(&ds.root, &dir.path().join("out"));
        for kind in AugKind::ALL {
            match kind {
                AugKind::Flip => c.flip.probability = 0.0,
                AugKind::Vscale => c.vscale.probability = 0.0,
                AugKind::Fdda => c.fdda.probability = 0.0,
                AugKind::Prlc => c.prlc.probability = 0.0,
                AugKind::Affine => c.affine.probability = 0.0,
                AugKind::Cutmix => c.cutmix.probability = 0.0,
            }
        }
        let summary = run_augment(&c).unwrap();
        assert!(summary.records.iter().all(|r| r.steps.is_empty()));
        for e in 0..2 {
            let out = Dataset::open(epoch_dir(&c.output, e)).unwrap();
            for i in 0..2 {
                let a = fs::read(ds.path_of(&ds.manifest.subjects[i].volume)).unwrap();
                let b = fs::read(out.path_of(&out.manifest.subjects[i].volume)).unwrap();
                assert_eq!(a, b);
                let a = fs::read(ds.path_of(&ds.manifest.subjects[i].surfaces)).unwrap();
                let b = fs::read(out.path_of(&out.manifest.subjects[i].surfaces)).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn zero_width_fdda_is_logged_identity() {
        let dir = tempfile::tempdir().unwrap();
        let ds = phantom_dataset(&dir.path().join("in"), 1);
        let mut c = config(&ds.root, &dir.path().join("out"));
        c.order = vec![AugKind::Fdda];
        c.fdda.probability = 1.0;
        c.fdda.a1 = Some(Interval::point(0.0));
        c.fdda.a2 = Some(Interval::point(0.0));
        c.fdda.a0_policy = Some(A0Policy::Fixed { value: 0.0 });
        let summary = run_augment(&c).unwrap();
        for r in &summary.records {
            assert_eq!(
                r.steps,
                vec![Step::Fdda {
                    coeffs: CoeffVector::zeros(2)
                }]
            );
        }
        let out = Dataset::open(epoch_dir(&c.output, 0)).unwrap();
        assert!(out.load_sample(0).unwrap().bit_eq(&ds.load_sample(0).unwrap()));
    }

    #[test]
    fn provenance_replays_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let ds = phantom_dataset(&dir.path().join("in"), 3);
        let mut c = config(&ds.root, &dir.path().join("out"));
        c.flip.probability = 0.7;
        c.fdda.probability = 0.8;
        c.prlc.probability = 0.8;
        c.cutmix.probability = 0.3;
        c.affine.probability = 0.3;
        c.workers = 2;
        run_augment(&c).unwrap();
        let records = read_provenance(c.output.join(PROVENANCE_FILE)).unwrap();
        assert_eq!(records.len(), 6);
        for r in &records {
            let out = Dataset::open(epoch_dir(&c.output, r.epoch)).unwrap();
            assert!(replay(&ds, r).unwrap().bit_eq(&out.load_sample(r.index).unwrap()));
        }
    }

    #[test]
    fn disabling_one_augmentation_keeps_other_draws() {
        let dir = tempfile::tempdir().unwrap();
        let ds = phantom_dataset(&dir.path().join("in"), 2);
        let mut c = config(&ds.root, &dir.path().join("a"));
        c.order = vec![AugKind::Vscale, AugKind::Fdda];
        c.vscale.probability = 1.0;
        c.fdda.probability = 1.0;
        c.fdda.a0_policy = Some(A0Policy::Fixed { value: 0.0 });
        let with = run_augment(&c).unwrap();
        c.order = vec![AugKind::Fdda];
        c.output = dir.path().join("b");
        let without = run_augment(&c).unwrap();
        for (a, b) in with.records.iter().zip(&without.records) {
            assert_eq!(a.steps[1], b.steps[0]);
        }
    }

    #[test]
    fn mask_files_are_copied_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("in");
        let ds = phantom_dataset(&root, 1);
        let mut m = ds.manifest.clone();
        m.subjects[0] = SubjectEntry {
            mask: Some("masks/p0.bin".into()),
            ..m.subjects[0].clone()
        };
        fs::create_dir_all(root.join("masks")).unwrap();
        fs::write(root.join("masks/p0.bin"), [1u8, 2, 3, 0, 255]).unwrap();
        m.write(root.join(MANIFEST_FILE)).unwrap();
        let c = config(&root, &dir.path().join("out"));
        run_augment(&c).unwrap();
        let copied = fs::read(epoch_dir(&c.output, 1).join("masks/p0.bin")).unwrap();
        assert_eq!(copied, vec![1u8, 2, 3, 0, 255]);
    }

    #[test]
    fn missing_input_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(&dir.path().join("nope"), &dir.path().join("out"));
        assert!(matches!(run_augment(&c), Err(Error::Config { .. })));
    }
}
