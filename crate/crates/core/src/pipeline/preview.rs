use std::fs;
use std::path::Path;

use rand::Rng;

use super::augment::{apply_step, Step};
use super::config::{AugKind, Preset};
use crate::baseline::{AffineParams, AffineRanges, Rect};
use crate::error::{Error, Result};
use crate::fdda::{self, CoeffVector, Interval};
use crate::io::{render_overlay, Dataset};
use crate::prlc::{self, PrlcParams};
use crate::rng::substream;
use crate::types::Sample;

/// One augmentation in a preview spec. `None` parameters are drawn from
/// the seed.
#[derive(Debug, Clone, PartialEq)]
pub enum PreviewOp {
    Flip,
    Vscale(Option<f64>),
    Fdda { coeffs: Option<Vec<f64>>, preset: Preset },
    Prlc,
    Affine(Option<AffineParams>),
    Cutmix,
}

pub type AugSpec = Vec<PreviewOp>;

fn spec_err(msg: String) -> Error {
    Error::InvalidValue(format!("augment spec: {msg}"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| spec_err(format!("`{key}` expects a number, got `{v}`")))
}

/// Parses `op[:key=value[;key=value...]]` terms joined by `+`, for example
/// `fdda:a=0,1,0+prlc` or `affine:rot=5;ty=2`. An empty spec or `none`
/// means no augmentation.
pub fn parse_aug_spec(spec: &str) -> Result<AugSpec> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "none" {
        return Ok(Vec::new());
    }
    spec.split('+').map(parse_op).collect()
}

fn parse_op(term: &str) -> Result<PreviewOp> {
    let (name, args) = match term.split_once(':') {
        Some((n, a)) => (n.trim(), a),
        None => (term.trim(), ""),
    };
    let mut pairs = Vec::new();
    for kv in args.split(';').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| spec_err(format!("`{kv}` is not key=value")))?;
        pairs.push((k.trim(), v.trim()));
    }
    let kind = AugKind::parse(name).ok_or_else(|| spec_err(format!("unknown augmentation `{name}`")))?;
    let unknown = |k: &str| spec_err(format!("`{name}` has no parameter `{k}`"));
    match kind {
        AugKind::Flip | AugKind::Prlc | AugKind::Cutmix => {
            if let Some((k, _)) = pairs.first() {
                return Err(unknown(k));
            }
            Ok(match kind {
                AugKind::Flip => PreviewOp::Flip,
                AugKind::Prlc => PreviewOp::Prlc,
                _ => PreviewOp::Cutmix,
            })
        }
        AugKind::Vscale => {
            let mut f = None;
            for (k, v) in pairs {
                match k {
                    "f" => f = Some(parse_f64(k, v)?),
                    _ => return Err(unknown(k)),
                }
            }
            Ok(PreviewOp::Vscale(f))
        }
        AugKind::Fdda => {
            let mut coeffs = None;
            let mut preset = Preset::Mshc;
            for (k, v) in pairs {
                match k {
                    "a" => {
                        coeffs = Some(v.split(',').map(|x| parse_f64(k, x)).collect::<Result<Vec<_>>>()?);
                    }
                    "preset" => {
                        preset = match v {
                            "mshc" => Preset::Mshc,
                            "duke" => Preset::Duke,
                            _ => return Err(spec_err(format!("unknown preset `{v}`"))),
                        }
                    }
                    _ => return Err(unknown(k)),
                }
            }
            Ok(PreviewOp::Fdda { coeffs, preset })
        }
        AugKind::Affine => {
            if pairs.is_empty() {
                return Ok(PreviewOp::Affine(None));
            }
            let mut p = AffineParams::identity();
            for (k, v) in pairs {
                let x = parse_f64(k, v)?;
                match k {
                    "rot" => p.rotation_deg = x,
                    "ty" => p.translation[0] = x,
                    "tx" => p.translation[1] = x,
                    "scale" => p.scale = x,
                    _ => return Err(unknown(k)),
                }
            }
            Ok(PreviewOp::Affine(Some(p)))
        }
    }
}

fn resolve(op: &PreviewOp, current: &Sample, dataset: &Dataset, seed: u64) -> Result<(Sample, Step)> {
    let kind = match op {
        PreviewOp::Flip => AugKind::Flip,
        PreviewOp::Vscale(_) => AugKind::Vscale,
        PreviewOp::Fdda { .. } => AugKind::Fdda,
        PreviewOp::Prlc => AugKind::Prlc,
        PreviewOp::Affine(_) => AugKind::Affine,
        PreviewOp::Cutmix => AugKind::Cutmix,
    };
    let mut rng = substream(seed, kind.stream_id());
    let step = match op {
        PreviewOp::Flip => Step::Flip,
        PreviewOp::Vscale(f) => Step::Vscale {
            factor: f.unwrap_or_else(|| Interval::new(0.9, 1.1).expect("ordered").sample(&mut rng)),
        },
        PreviewOp::Fdda { coeffs: Some(a), .. } => Step::Fdda {
            coeffs: CoeffVector::new(a.clone())?,
        },
        PreviewOp::Fdda { coeffs: None, preset } => Step::Fdda {
            coeffs: fdda::sample_coeffs(&preset.fdda_ranges(), current, &mut rng)?,
        },
        PreviewOp::Prlc => {
            let (out, record) = prlc::apply_prlc(current, &PrlcParams::default(), &mut rng)?;
            return Ok((out, Step::Prlc { record }));
        }
        PreviewOp::Affine(p) => Step::Affine {
            params: p.unwrap_or_else(|| AffineRanges::default().sample(current.rows(), current.cols(), &mut rng)),
        },
        PreviewOp::Cutmix => Step::Cutmix {
            partner: rng.gen_range(0..dataset.len()),
            rect: Rect::sample(current.rows(), current.cols(), &mut rng),
        },
    };
    Ok((apply_step(current, &step, dataset)?, step))
}

/// Applies `spec` to one subject and writes `before.png`, `after.png` and
/// the applied steps as `steps.json` into `out`.
pub fn run_preview(
    input: impl AsRef<Path>,
    subject: Option<&str>,
    slice: usize,
    spec: &AugSpec,
    seed: u64,
    out: impl AsRef<Path>,
) -> Result<(Sample, Sample, Vec<Step>)> {
    let dataset = Dataset::open(input.as_ref())?;
    let index = match subject {
        None if dataset.is_empty() => return Err(Error::EmptyList),
        None => 0,
        Some(id) => dataset
            .manifest
            .subjects
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| Error::SubjectMismatch(format!("no subject `{id}` in {}", dataset.root.display())))?,
    };
    let before = dataset.load_sample(index)?;
    if slice >= before.slice_count() {
        return Err(Error::SliceOutOfRange {
            index: slice,
            count: before.slice_count(),
        });
    }
    let mut after = before.clone();
    let mut steps = Vec::with_capacity(spec.len());
    for op in spec {
        let (next, step) = resolve(op, &after, &dataset, seed)?;
        after = next;
        steps.push(step);
    }
    let out = out.as_ref();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    render_overlay(&before, slice, out.join("before.png"))?;
    render_overlay(&after, slice, out.join("after.png"))?;
    let path = out.join("steps.json");
    let mut text = serde_json::to_string_pretty(&steps).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok((before, after, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let spec = parse_aug_spec("fdda:a=0,1,0+prlc").unwrap();
        assert_eq!(
            spec,
            vec![
                PreviewOp::Fdda {
                    coeffs: Some(vec![0.0, 1.0, 0.0]),
                    preset: Preset::Mshc
                },
                PreviewOp::Prlc
            ]
        );
        assert_eq!(parse_aug_spec("").unwrap(), vec![]);
        assert_eq!(parse_aug_spec("none").unwrap(), vec![]);
        let spec = parse_aug_spec("affine:rot=5;ty=-2+vscale:f=1.05+flip").unwrap();
        assert_eq!(
            spec[0],
            PreviewOp::Affine(Some(AffineParams {
                rotation_deg: 5.0,
                translation: [-2.0, 0.0],
                scale: 1.0
            }))
        );
        assert_eq!(spec[1], PreviewOp::Vscale(Some(1.05)));
    }

    #[test]
    fn rejects_bad_terms() {
        for s in ["mixup", "flip:x=1", "vscale:f=abc", "fdda:a", "fdda:preset=foo"] {
            assert!(matches!(parse_aug_spec(s), Err(Error::InvalidValue(_))), "{s}");
        }
    }
}
