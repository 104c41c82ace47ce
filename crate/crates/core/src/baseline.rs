//! Conventional augmentations, each keeping labels consistent with pixels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdda::Interval;
use crate::types::{BScan, Sample, SurfaceSet, Volume};

fn with_slices(sample: &Sample, slices: Vec<BScan>, surfaces: SurfaceSet) -> Sample {
    Sample {
        volume: Volume {
            slices,
            ..sample.volume.clone()
        },
        surfaces,
    }
}

/// Mirrors columns: column `n2` moves to `N2 + 1 - n2`.
pub fn horizontal_flip(sample: &Sample) -> Sample {
    let slices = sample
        .volume
        .slices
        .iter()
        .map(|img| {
            let cols = img.cols();
            BScan::from_fn(img.rows(), cols, |r, c| img.get(r, cols - 1 - c))
        })
        .collect();
    let mut surfaces = sample.surfaces.clone();
    for s in 0..surfaces.slice_count() {
        for b in 0..surfaces.surface_count() {
            surfaces.line_mut(s, b).reverse();
        }
    }
    with_slices(sample, slices, surfaces)
}

/// Linear interpolation at 1-based coordinate `y` along a strided column.
/// Zero outside `[1, len]`.
fn interp_column(img: &BScan, col: usize, y: f64) -> f32 {
    let n = img.rows();
    if !(y >= 1.0 && y <= n as f64) {
        return 0.0;
    }
    let y0 = y.floor();
    let frac = y - y0;
    let r0 = y0 as usize - 1;
    let v0 = img.get(r0, col);
    if frac == 0.0 {
        return v0;
    }
    let v1 = img.get(r0 + 1, col);
    ((1.0 - frac) * v0 as f64 + frac * v1 as f64) as f32
}

/// Scales each column about the top row (coordinate 1) by `factor`.
///
/// Pixels are linearly interpolated and zero-filled where the source lies
/// outside the image. Boundaries map to `1 + factor * (b - 1)`; those
/// leaving `[1, N1]` become INVALID.
pub fn vertical_scale(sample: &Sample, factor: f64) -> Result<Sample> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::NonPositiveFactor(factor));
    }
    if factor == 1.0 {
        return Ok(sample.clone());
    }
    let rows = sample.rows();
    let slices = sample
        .volume
        .slices
        .iter()
        .map(|img| {
            BScan::from_fn(rows, img.cols(), |r, c| {
                let y = 1.0 + r as f64 / factor;
                interp_column(img, c, y)
            })
        })
        .collect();
    let max_row = rows as f64;
    let mut surfaces = sample.surfaces.clone();
    for s in 0..surfaces.slice_count() {
        for p in surfaces.slice_positions_mut(s) {
            *p = p
                .map(|b| 1.0 + factor * (b - 1.0))
                .filter(|b| (1.0..=max_row).contains(b));
        }
    }
    Ok(with_slices(sample, slices, surfaces))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    pub rotation_deg: f64,
    /// `(rows, cols)` translation in pixels.
    pub translation: [f64; 2],
    pub scale: f64,
}

impl AffineParams {
    pub fn identity() -> Self {
        Self {
            rotation_deg: 0.0,
            translation: [0.0, 0.0],
            scale: 1.0,
        }
    }

    pub fn translation(rows: f64, cols: f64) -> Self {
        Self {
            translation: [rows, cols],
            ..Self::identity()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AffineRanges {
    pub rotation_deg: Interval,
    /// Maximum translation as a fraction of `(N1, N2)`.
    pub translate_frac: f64,
    pub scale: Interval,
}

impl Default for AffineRanges {
    fn default() -> Self {
        Self {
            rotation_deg: Interval::symmetric(10.0),
            translate_frac: 0.1,
            scale: Interval::new(0.9, 1.1).expect("ordered"),
        }
    }
}

impl AffineRanges {
    pub fn sample<R: Rng + ?Sized>(&self, rows: usize, cols: usize, rng: &mut R) -> AffineParams {
        let rotation_deg = self.rotation_deg.sample(rng);
        let ty = Interval::symmetric(self.translate_frac * rows as f64).sample(rng);
        let tx = Interval::symmetric(self.translate_frac * cols as f64).sample(rng);
        let scale = self.scale.sample(rng);
        AffineParams {
            rotation_deg,
            translation: [ty, tx],
            scale,
        }
    }
}

/// Similarity transform about the geometric image centre, in 1-based
/// `(row, col)` coordinates.
struct AffineMap {
    center: (f64, f64),
    cos: f64,
    sin: f64,
    scale: f64,
    t: (f64, f64),
}

impl AffineMap {
    fn new(params: &AffineParams, rows: usize, cols: usize) -> Result<Self> {
        if !(params.scale.abs() >= 1e-6) {
            return Err(Error::SingularTransform(params.scale));
        }
        let theta = params.rotation_deg.to_radians();
        Ok(Self {
            center: ((rows as f64 + 1.0) / 2.0, (cols as f64 + 1.0) / 2.0),
            cos: theta.cos(),
            sin: theta.sin(),
            scale: params.scale,
            t: (params.translation[0], params.translation[1]),
        })
    }

    // Written as p + t + (M - I)(p - c) so the linear part vanishes exactly
    // for pure translations.
    fn forward(&self, y: f64, x: f64) -> (f64, f64) {
        let (dy, dx) = (y - self.center.0, x - self.center.1);
        let my = self.scale * (self.cos * dy - self.sin * dx) - dy;
        let mx = self.scale * (self.sin * dy + self.cos * dx) - dx;
        (y + self.t.0 + my, x + self.t.1 + mx)
    }

    fn inverse(&self, y: f64, x: f64) -> (f64, f64) {
        let (py, px) = (y - self.t.0, x - self.t.1);
        let (qy, qx) = (py - self.center.0, px - self.center.1);
        let my = (self.cos * qy + self.sin * qx) / self.scale - qy;
        let mx = (self.cos * qx - self.sin * qy) / self.scale - qx;
        (py + my, px + mx)
    }
}

/// Bilinear sample at 1-based `(y, x)`; zero outside the image.
fn bilinear(img: &BScan, y: f64, x: f64) -> f32 {
    let (rows, cols) = (img.rows() as f64, img.cols() as f64);
    if !(y >= 1.0 && y <= rows && x >= 1.0 && x <= cols) {
        return 0.0;
    }
    let (y0, x0) = (y.floor(), x.floor());
    let (fy, fx) = (y - y0, x - x0);
    let (r0, c0) = (y0 as usize - 1, x0 as usize - 1);
    if fy == 0.0 && fx == 0.0 {
        return img.get(r0, c0);
    }
    let at = |dr: usize, dc: usize, w: f64| -> f64 {
        if w == 0.0 {
            0.0
        } else {
            w * img.get(r0 + dr, c0 + dc) as f64
        }
    };
    (at(0, 0, (1.0 - fy) * (1.0 - fx))
        + at(0, 1, (1.0 - fy) * fx)
        + at(1, 0, fy * (1.0 - fx))
        + at(1, 1, fy * fx)) as f32
}

/// Maps one boundary line through the transform and resamples it at
/// integer output columns along the mapped polyline.
fn warp_line(map: &AffineMap, line: &[Option<f64>], rows: usize) -> Vec<Option<f64>> {
    let cols = line.len();
    let pts: Vec<Option<(f64, f64)>> = line
        .iter()
        .enumerate()
        .map(|(c, p)| p.map(|b| map.forward(b, (c + 1) as f64)))
        .collect();
    let mut out: Vec<Option<f64>> = vec![None; cols];
    let mut assign = |x: f64, y: f64| {
        if x >= 1.0 && x <= cols as f64 {
            let slot = &mut out[x as usize - 1];
            if slot.is_none() {
                *slot = Some(y);
            }
        }
    };
    for c in 0..cols {
        let Some((py, px)) = pts[c] else { continue };
        let next = pts.get(c + 1).copied().flatten();
        let prev = if c > 0 { pts[c - 1] } else { None };
        match next {
            Some((qy, qx)) => {
                let (lo, hi) = (px.min(qx), px.max(qx));
                let mut x = lo.ceil();
                while x <= hi {
                    let y = if qx == px {
                        py
                    } else {
                        let t = (x - px) / (qx - px);
                        if t == 0.0 {
                            py
                        } else if t == 1.0 {
                            qy
                        } else {
                            py + t * (qy - py)
                        }
                    };
                    assign(x, y);
                    x += 1.0;
                }
            }
            None if prev.is_none() => assign((px + 0.5).floor(), py),
            None => {}
        }
    }
    let max_row = rows as f64;
    out.into_iter()
        .map(|p| p.filter(|y| (1.0..=max_row).contains(y)))
        .collect()
}

/// Warps every slice by the same similarity transform.
pub fn random_affine(sample: &Sample, params: &AffineParams) -> Result<Sample> {
    let (rows, cols) = (sample.rows(), sample.cols());
    let map = AffineMap::new(params, rows, cols)?;
    let slices = sample
        .volume
        .slices
        .iter()
        .map(|img| {
            BScan::from_fn(rows, cols, |r, c| {
                let (y, x) = map.inverse((r + 1) as f64, (c + 1) as f64);
                bilinear(img, y, x)
            })
        })
        .collect();
    let mut surfaces = sample.surfaces.clone();
    for s in 0..surfaces.slice_count() {
        for b in 0..surfaces.surface_count() {
            let warped = warp_line(&map, sample.surfaces.line(s, b), rows);
            surfaces.line_mut(s, b).copy_from_slice(&warped);
        }
    }
    Ok(with_slices(sample, slices, surfaces))
}

/// Half-open pixel rectangle, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        self.rows[0] >= self.rows[1] || self.cols[0] >= self.cols[1]
    }

    /// Whether the pixel containing coordinate `p` lies in the row span.
    fn holds_row(&self, p: f64) -> bool {
        let idx = (p + 0.5).floor() - 1.0;
        idx >= self.rows[0] as f64 && idx < self.rows[1] as f64
    }

    pub fn sample<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut span = |n: usize| {
            let (a, b) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
            [a.min(b), a.max(b)]
        };
        let rows = span(rows);
        let cols = span(cols);
        Self { rows, cols }
    }
}

/// Pastes `rect` of `b` into `a` in every slice.
///
/// Label rule, inside the rectangle's columns: an entry of `a` lying inside
/// the rectangle is replaced by `b`'s entry if that lies inside too, and
/// becomes INVALID otherwise. Boundary labels have no established CutMix
/// semantics; this rule exists for comparison runs only.
pub fn cutmix_with_rect(a: &Sample, b: &Sample, rect: Rect) -> Result<Sample> {
    if a.slice_count() != b.slice_count()
        || a.rows() != b.rows()
        || a.cols() != b.cols()
        || a.surfaces.surface_count() != b.surfaces.surface_count()
    {
        return Err(Error::dims("cutmix samples differ in shape"));
    }
    if rect.rows[1] > a.rows() || rect.cols[1] > a.cols() {
        return Err(Error::dims("cutmix rectangle exceeds image"));
    }
    if rect.is_empty() {
        return Ok(a.clone());
    }
    let mut slices = a.volume.slices.clone();
    for (dst, src) in slices.iter_mut().zip(&b.volume.slices) {
        for r in rect.rows[0]..rect.rows[1] {
            for c in rect.cols[0]..rect.cols[1] {
                dst.set(r, c, src.get(r, c));
            }
        }
    }
    let mut surfaces = a.surfaces.clone();
    for s in 0..surfaces.slice_count() {
        for k in 0..surfaces.surface_count() {
            for c in rect.cols[0]..rect.cols[1] {
                let Some(pa) = a.surfaces.get(s, k, c) else { continue };
                if !rect.holds_row(pa) {
                    continue;
                }
                let replacement = b.surfaces.get(s, k, c).filter(|&pb| rect.holds_row(pb));
                surfaces.set(s, k, c, replacement);
            }
        }
    }
    Ok(with_slices(a, slices, surfaces))
}

pub fn cutmix<R: Rng + ?Sized>(a: &Sample, b: &Sample, rng: &mut R) -> Result<(Sample, Rect)> {
    let rect = Rect::sample(a.rows(), a.cols(), rng);
    Ok((cutmix_with_rect(a, b, rect)?, rect))
}
