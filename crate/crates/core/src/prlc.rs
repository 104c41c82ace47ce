//! Partial layer copying.
//!
//! A block of `l` adjacent layers over a `W`-column window is cut out of
//! each slice and pasted into the background (above the topmost or below
//! the bottommost labeled boundary). Labels are left untouched, so the
//! pasted block acts as an unlabeled distractor.
//!
//! All draws (l, W, layer block, window, anchor) happen once per volume;
//! each slice pastes its own patch at the shared anchor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{LayerTopology, Sample, SurfaceSet, Volume};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrlcParams {
    /// Inclusive range for the number of copied layers.
    pub l: [usize; 2],
    /// Inclusive lower bound on the window width.
    pub w_min: usize,
    /// Inclusive upper bound on the window width; `None` means the image width.
    pub w_max: Option<usize>,
    pub max_restarts: usize,
}

impl Default for PrlcParams {
    fn default() -> Self {
        Self {
            l: [1, 3],
            w_min: 20,
            w_max: None,
            max_restarts: 10,
        }
    }
}

impl PrlcParams {
    pub fn check(&self) -> Result<()> {
        if self.l[0] == 0 || self.l[0] > self.l[1] {
            return Err(Error::InvalidValue(format!("bad layer range {:?}", self.l)));
        }
        if self.w_min == 0 || self.w_max.is_some_and(|hi| hi < self.w_min) {
            return Err(Error::InvalidValue(format!(
                "bad width range [{}, {:?}]",
                self.w_min, self.w_max
            )));
        }
        if self.max_restarts == 0 {
            return Err(Error::InvalidValue("max_restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Inclusive range of layer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerInterval {
    pub first: usize,
    pub last: usize,
}

impl LayerInterval {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn upper_surface(&self) -> usize {
        self.first
    }

    pub fn lower_surface(&self) -> usize {
        self.last + 1
    }
}

/// The `l`-layer block around `target`, pushed inward at the edges.
pub fn layer_block_for_target(layers: usize, l: usize, target: usize) -> Result<LayerInterval> {
    if l == 0 || l > layers {
        return Err(Error::InvalidL { l, layers });
    }
    assert!(target < layers, "target layer {target} out of range");
    let first = target.saturating_sub((l - 1) / 2).min(layers - l);
    Ok(LayerInterval {
        first,
        last: first + l - 1,
    })
}

/// Draws a target layer uniformly and returns the `l`-layer block holding it.
pub fn choose_layer_block<R: Rng + ?Sized>(
    topology: LayerTopology,
    l: usize,
    rng: &mut R,
) -> Result<LayerInterval> {
    let layers = topology.layer_count();
    if l == 0 || l > layers {
        return Err(Error::InvalidL { l, layers });
    }
    let target = rng.gen_range(0..layers);
    layer_block_for_target(layers, l, target)
}

/// One column of a patch: contiguous rows starting at `top` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct PatchColumn {
    pub top: usize,
    pub values: Vec<f32>,
}

impl PatchColumn {
    pub fn bottom(&self) -> usize {
        self.top + self.values.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerPatch {
    pub start_col: usize,
    pub width: usize,
    pub interval: LayerInterval,
    /// `[slice][column offset]`; `None` where the block is not copyable.
    pub columns: Vec<Vec<Option<PatchColumn>>>,
}

impl LayerPatch {
    pub fn pixel_count(&self) -> usize {
        self.columns
            .iter()
            .flatten()
            .flatten()
            .map(|c| c.values.len())
            .sum()
    }

    /// Smallest top row and largest bottom row over all slices.
    fn row_span(&self) -> Option<(usize, usize)> {
        self.columns
            .iter()
            .flatten()
            .flatten()
            .fold(None, |acc, c| {
                Some(match acc {
                    None => (c.top, c.bottom()),
                    Some((t, b)) => (t.min(c.top), b.max(c.bottom())),
                })
            })
    }
}

/// Pixel rows (0-based, inclusive) strictly inside `[upper, lower]`.
fn block_rows(upper: f64, lower: f64, rows: usize) -> Option<(usize, usize)> {
    let top = (upper.ceil() as i64 - 1).max(0);
    let bottom = (lower.floor() as i64 - 1).min(rows as i64 - 1);
    (top <= bottom).then_some((top as usize, bottom as usize))
}

/// Copies the layer block over columns `start_col..start_col + width`
/// (0-based) from every slice.
pub fn extract_patch(
    sample: &Sample,
    interval: LayerInterval,
    start_col: usize,
    width: usize,
) -> Result<LayerPatch> {
    let (rows, cols) = (sample.rows(), sample.cols());
    if width == 0 || start_col + width > cols {
        return Err(Error::InvalidValue(format!(
            "window {start_col}+{width} exceeds {cols} columns"
        )));
    }
    let surf = &sample.surfaces;
    if interval.lower_surface() >= surf.surface_count() {
        return Err(Error::InvalidL {
            l: interval.len(),
            layers: surf.surface_count().saturating_sub(1),
        });
    }
    let columns: Vec<Vec<Option<PatchColumn>>> = sample
        .volume
        .slices
        .iter()
        .enumerate()
        .map(|(s, img)| {
            (start_col..start_col + width)
                .map(|c| {
                    let upper = surf.get(s, interval.upper_surface(), c)?;
                    let lower = surf.get(s, interval.lower_surface(), c)?;
                    let (top, bottom) = block_rows(upper, lower, rows)?;
                    Some(PatchColumn {
                        top,
                        values: (top..=bottom).map(|r| img.get(r, c)).collect(),
                    })
                })
                .collect()
        })
        .collect();
    let patch = LayerPatch {
        start_col,
        width,
        interval,
        columns,
    };
    if patch.pixel_count() == 0 {
        return Err(Error::EmptyPatch);
    }
    Ok(patch)
}

/// Paste position: source pixel `(r, start_col + j)` lands on
/// `(r + row_offset, col + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub row_offset: i64,
    pub col: usize,
}

/// Labeled pixel rows (0-based, inclusive) per `[slice][column]`: rows whose
/// coordinate lies between the topmost and bottommost valid boundary.
pub fn labeled_rows(surfaces: &SurfaceSet, rows: usize) -> Vec<Vec<Option<(i64, i64)>>> {
    (0..surfaces.slice_count())
        .map(|s| {
            (0..surfaces.cols())
                .map(|c| {
                    let (top, bottom) = surfaces.extent(s, c)?;
                    let t = top.ceil() as i64 - 1;
                    let b = (bottom.floor() as i64 - 1).min(rows as i64 - 1);
                    (t <= b).then_some((t, b))
                })
                .collect()
        })
        .collect()
}

/// Feasible row offsets for each destination column, as sorted disjoint
/// inclusive intervals.
fn feasible_offsets(surfaces: &SurfaceSet, rows: usize, patch: &LayerPatch) -> Vec<(usize, Vec<(i64, i64)>)> {
    let Some((span_top, span_bottom)) = patch.row_span() else {
        return Vec::new();
    };
    let cols = surfaces.cols();
    if patch.width > cols {
        return Vec::new();
    }
    let lo = -(span_top as i64);
    let hi = rows as i64 - 1 - span_bottom as i64;
    if lo > hi {
        return Vec::new();
    }
    let labeled = labeled_rows(surfaces, rows);
    let mut out = Vec::new();
    let mut forbidden: Vec<(i64, i64)> = Vec::new();
    for dest in 0..=cols - patch.width {
        forbidden.clear();
        for (s, slice_cols) in patch.columns.iter().enumerate() {
            for (j, pc) in slice_cols.iter().enumerate() {
                let (Some(pc), Some((t, b))) = (pc, labeled[s][dest + j]) else {
                    continue;
                };
                // [top + dr, bottom + dr] meets [t, b]
                forbidden.push((t - pc.bottom() as i64, b - pc.top as i64));
            }
        }
        forbidden.sort_unstable();
        let mut free = Vec::new();
        let mut cursor = lo;
        for &(f0, f1) in &forbidden {
            if f1 < cursor {
                continue;
            }
            if f0 > hi {
                break;
            }
            if f0 > cursor {
                free.push((cursor, f0 - 1));
            }
            cursor = cursor.max(f1 + 1);
            if cursor > hi {
                break;
            }
        }
        if cursor <= hi {
            free.push((cursor, hi));
        }
        if !free.is_empty() {
            out.push((dest, free));
        }
    }
    out
}

/// Number of anchors at which the patch fits entirely in background.
pub fn count_anchors(surfaces: &SurfaceSet, rows: usize, patch: &LayerPatch) -> u64 {
    feasible_offsets(surfaces, rows, patch)
        .iter()
        .flat_map(|(_, iv)| iv)
        .map(|(a, b)| (b - a + 1) as u64)
        .sum()
}

/// Draws an anchor uniformly from every position where no patch pixel, in
/// any slice, covers a labeled pixel and the patch stays inside the image.
pub fn find_paste_anchor<R: Rng + ?Sized>(
    surfaces: &SurfaceSet,
    rows: usize,
    patch: &LayerPatch,
    rng: &mut R,
) -> Result<Anchor> {
    let candidates = feasible_offsets(surfaces, rows, patch);
    let total: u64 = candidates
        .iter()
        .flat_map(|(_, iv)| iv)
        .map(|(a, b)| (b - a + 1) as u64)
        .sum();
    if total == 0 {
        return Err(Error::NoSpace);
    }
    let mut k = rng.gen_range(0..total);
    for (col, intervals) in &candidates {
        for &(a, b) in intervals {
            let n = (b - a + 1) as u64;
            if k < n {
                return Ok(Anchor {
                    row_offset: a + k as i64,
                    col: *col,
                });
            }
            k -= n;
        }
    }
    unreachable!("index within candidate count")
}

/// Writes each slice's patch at the shared anchor. Labels are copied as is.
pub fn paste_patch(sample: &Sample, patch: &LayerPatch, anchor: Anchor) -> Result<Sample> {
    if patch.columns.len() != sample.slice_count() {
        return Err(Error::dims("patch slice count differs from sample"));
    }
    let rows = sample.rows() as i64;
    if anchor.col + patch.width > sample.cols() {
        return Err(Error::dims("patch footprint exceeds image width"));
    }
    let mut slices = sample.volume.slices.clone();
    for (img, slice_cols) in slices.iter_mut().zip(&patch.columns) {
        for (j, pc) in slice_cols.iter().enumerate() {
            let Some(pc) = pc else { continue };
            for (i, &v) in pc.values.iter().enumerate() {
                let r = (pc.top + i) as i64 + anchor.row_offset;
                if !(0..rows).contains(&r) {
                    return Err(Error::dims("patch footprint exceeds image height"));
                }
                img.set(r as usize, anchor.col + j, v);
            }
        }
    }
    Ok(Sample {
        volume: Volume {
            slices,
            ..sample.volume.clone()
        },
        surfaces: sample.surfaces.clone(),
    })
}

/// Parameters of one successful paste, enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrlcRecord {
    pub l: usize,
    pub width: usize,
    pub interval: LayerInterval,
    pub start_col: usize,
    pub anchor: Anchor,
    pub attempts: usize,
}

/// Runs the copy-paste with restarts. Returns the input unchanged (and no
/// record) when no paste fits within `max_restarts` attempts.
pub fn apply_prlc<R: Rng + ?Sized>(
    sample: &Sample,
    params: &PrlcParams,
    rng: &mut R,
) -> Result<(Sample, Option<PrlcRecord>)> {
    params.check()?;
    let topology = LayerTopology::of(&sample.surfaces);
    let layers = topology.layer_count();
    let cols = sample.cols();
    let l_hi = params.l[1].min(layers);
    let w_hi = params.w_max.unwrap_or(cols).min(cols);
    if params.l[0] > l_hi || params.w_min > w_hi {
        return Ok((sample.clone(), None));
    }
    for attempt in 1..=params.max_restarts {
        let l = rng.gen_range(params.l[0]..=l_hi);
        let width = rng.gen_range(params.w_min..=w_hi);
        let interval = choose_layer_block(topology, l, rng)?;
        let start_col = rng.gen_range(0..=cols - width);
        let patch = match extract_patch(sample, interval, start_col, width) {
            Ok(p) => p,
            Err(Error::EmptyPatch) => continue,
            Err(e) => return Err(e),
        };
        let anchor = match find_paste_anchor(&sample.surfaces, sample.rows(), &patch, rng) {
            Ok(a) => a,
            Err(Error::NoSpace) => continue,
            Err(e) => return Err(e),
        };
        let out = paste_patch(sample, &patch, anchor)?;
        log::debug!("prlc pasted l={l} W={width} at {anchor:?} after {attempt} attempt(s)");
        return Ok((
            out,
            Some(PrlcRecord {
                l,
                width,
                interval,
                start_col,
                anchor,
                attempts: attempt,
            }),
        ));
    }
    Ok((sample.clone(), None))
}

/// Re-applies a recorded paste.
pub fn replay_prlc(sample: &Sample, record: &PrlcRecord) -> Result<Sample> {
    let patch = extract_patch(sample, record.interval, record.start_col, record.width)?;
    paste_patch(sample, &patch, record.anchor)
}
