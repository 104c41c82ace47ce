//! Formula-driven column shifting.
//!
//! Each column `n2` (1-based) of every B-scan is shifted vertically by
//!
//! ```text
//! delta(n2) = sum_k a(k) * (n2 - c2)^k,     c2 = floor(N2 / 2) + 1
//! ```
//!
//! rounded to `s(n2) = floor(delta(n2) + 0.5)`. The shifted image is the
//! gather `out(n1, n2) = in(n1 + s(n2), n2)`, zero where the source row
//! falls outside the image. A boundary at row `b` therefore moves to
//! `b - s(n2)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BScan, Center, Sample, SurfaceSet, Volume};

/// Polynomial coefficients `a(0)..=a(N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffVector(Vec<f64>);

impl CoeffVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidValue("coefficient vector is empty".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite coefficient {c}")));
        }
        Ok(Self(coeffs))
    }

    pub fn zeros(order: usize) -> Self {
        Self(vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidValue(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(half_width: f64) -> Self {
        Self::new(-half_width.abs(), half_width.abs()).expect("finite")
    }

    pub fn point(v: f64) -> Self {
        Self::new(v, v).expect("finite")
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.lo..=self.hi).contains(&v)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// How the zero-order coefficient is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum A0Policy {
    /// Uniform over every `a(0)` that keeps all labeled boundaries inside
    /// the image once combined with the drawn higher-order terms. Falls
    /// back to `a(0) = 0` if no such value exists.
    KeepInFrame,
    Fixed { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FddaRanges {
    pub order: usize,
    pub a1: Interval,
    pub a2: Interval,
    /// Ranges for `a(3)..=a(order)`; missing entries draw zero.
    pub higher: Vec<Interval>,
    pub a0: A0Policy,
}

impl FddaRanges {
    /// Second-order ranges used for 496x1024 MSHC volumes.
    pub fn mshc() -> Self {
        Self {
            order: 2,
            a1: Interval::symmetric(0.5),
            a2: Interval::symmetric(0.0002),
            higher: Vec::new(),
            a0: A0Policy::KeepInFrame,
        }
    }

    /// Second-order ranges used for 496x768 Duke DME volumes.
    pub fn duke() -> Self {
        Self {
            a2: Interval::symmetric(0.00068),
            ..Self::mshc()
        }
    }

    fn range_for(&self, k: usize) -> Option<Interval> {
        match k {
            1 => Some(self.a1),
            2 => Some(self.a2),
            k => self.higher.get(k - 3).copied(),
        }
    }
}

/// Per-column real shift and its rounded integer form.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftField {
    delta: Vec<f64>,
    rounded: Vec<i64>,
}

#[inline]
fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

impl ShiftField {
    pub fn from_delta(delta: Vec<f64>) -> Self {
        let rounded = delta.iter().map(|&d| round_half_up(d)).collect();
        Self { delta, rounded }
    }

    /// Integer field, as if `delta` were already integral.
    pub fn from_shifts(shifts: Vec<i64>) -> Self {
        Self {
            delta: shifts.iter().map(|&s| s as f64).collect(),
            rounded: shifts,
        }
    }

    pub fn width(&self) -> usize {
        self.delta.len()
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn shifts(&self) -> &[i64] {
        &self.rounded
    }

    pub fn negated(&self) -> Self {
        Self::from_shifts(self.rounded.iter().map(|s| -s).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.rounded.iter().all(|&s| s == 0)
    }
}

/// Higher-order part `sum_{k>=1} a(k) t^k` at offset `t`.
fn higher_order_term(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * t.powi(k as i32))
        .sum()
}

fn column_offsets(cols: usize) -> impl Iterator<Item = f64> {
    let c2 = Center::of(1, cols).c2 as f64;
    (1..=cols).map(move |n2| n2 as f64 - c2)
}

/// Evaluates the shift polynomial at every column of a `cols`-wide image.
pub fn compute_shift_field(coeffs: &CoeffVector, cols: usize) -> ShiftField {
    let a = coeffs.as_slice();
    let delta = column_offsets(cols)
        .map(|t| a[0] + higher_order_term(a, t))
        .collect();
    ShiftField::from_delta(delta)
}

/// Gathers every column of `img` by its integer shift, zero-padding.
pub fn apply_to_image(img: &BScan, field: &ShiftField) -> Result<BScan> {
    if field.width() != img.cols() {
        return Err(Error::dims(format!(
            "shift field width {} vs image width {}",
            field.width(),
            img.cols()
        )));
    }
    let rows = img.rows() as i64;
    let mut out = BScan::zeros(img.rows(), img.cols());
    for (col, &s) in field.shifts().iter().enumerate() {
        // Destination rows whose source row r + s is inside [0, rows).
        let start = (-s).clamp(0, rows);
        let end = (rows - s).clamp(0, rows);
        for r in start..end {
            out.set(r as usize, col, img.get((r + s) as usize, col));
        }
    }
    Ok(out)
}

/// Moves boundary positions (`[surface][column]`, flattened) with the field.
///
/// A boundary at row `b` lands at `b - s`; results outside `[1, rows]`
/// become INVALID.
pub fn apply_to_surfaces(
    positions: &[Option<f64>],
    field: &ShiftField,
    rows: usize,
) -> Result<Vec<Option<f64>>> {
    let cols = field.width();
    if cols == 0 || positions.len() % cols != 0 {
        return Err(Error::dims(format!(
            "{} positions cannot be split into columns of width {cols}",
            positions.len()
        )));
    }
    let max_row = rows as f64;
    Ok(positions
        .chunks(cols)
        .flat_map(|line| {
            line.iter().zip(field.shifts()).map(move |(p, &s)| {
                p.map(|b| b - s as f64)
                    .filter(|b| (1.0..=max_row).contains(b))
            })
        })
        .collect())
}

/// Applies one shared field to every slice of a sample.
pub fn apply_to_volume(sample: &Sample, coeffs: &CoeffVector) -> Result<Sample> {
    let field = compute_shift_field(coeffs, sample.cols());
    apply_field_to_volume(sample, &field)
}

pub fn apply_field_to_volume(sample: &Sample, field: &ShiftField) -> Result<Sample> {
    if field.is_identity() && field.width() == sample.cols() {
        return Ok(sample.clone());
    }
    let slices = sample
        .volume
        .slices
        .iter()
        .map(|img| apply_to_image(img, field))
        .collect::<Result<Vec<_>>>()?;
    let rows = sample.rows();
    let src = &sample.surfaces;
    let mut positions = Vec::with_capacity(src.positions().len());
    for s in 0..src.slice_count() {
        positions.extend(apply_to_surfaces(src.slice_positions(s), field, rows)?);
    }
    let surfaces = SurfaceSet::new(
        src.slice_count(),
        src.surface_count(),
        src.cols(),
        src.names().to_vec(),
        positions,
    )?;
    let volume = Volume {
        slices,
        ..sample.volume.clone()
    };
    Sample::new(volume, surfaces)
}

/// Draws coefficients for one application.
///
/// Higher orders are drawn first; `a(0)` is drawn last because under
/// [`A0Policy::KeepInFrame`] its feasible range depends on them.
pub fn sample_coeffs<R: Rng + ?Sized>(
    ranges: &FddaRanges,
    sample: &Sample,
    rng: &mut R,
) -> Result<CoeffVector> {
    let mut a = vec![0.0; ranges.order + 1];
    for (k, slot) in a.iter_mut().enumerate().skip(1) {
        if let Some(range) = ranges.range_for(k) {
            *slot = range.sample(rng);
        }
    }
    a[0] = match ranges.a0 {
        A0Policy::Fixed { value } => value,
        A0Policy::Uniform { lo, hi } => Interval::new(lo, hi)?.sample(rng),
        A0Policy::KeepInFrame => {
            let (lo, hi) = feasible_a0(&a, sample)?;
            draw_a0(&mut a, lo, hi, sample, rng)
        }
    };
    CoeffVector::new(a)
}

/// Half-open interval `[lo, hi)` of `a(0)` values keeping every valid
/// boundary in frame, given the higher-order coefficients in `a[1..]`.
/// Empty when `lo >= hi`.
pub fn feasible_a0(a: &[f64], sample: &Sample) -> Result<(f64, f64)> {
    let surf = &sample.surfaces;
    let rows = sample.rows() as f64;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut any = false;
    for (col, t) in column_offsets(sample.cols()).enumerate() {
        let mut extent: Option<(f64, f64)> = None;
        for s in 0..surf.slice_count() {
            if let Some((top, bottom)) = surf.extent(s, col) {
                extent = Some(match extent {
                    None => (top, bottom),
                    Some((t0, b0)) => (t0.min(top), b0.max(bottom)),
                });
            }
        }
        let Some((top, bottom)) = extent else { continue };
        any = true;
        // Integer shifts s with 1 <= top - s and bottom - s <= rows.
        let s_min = (bottom - rows).ceil();
        let s_max = (top - 1.0).floor();
        let rest = higher_order_term(a, t);
        lo = lo.max(s_min - rest - 0.5);
        hi = hi.min(s_max + 0.5 - rest);
    }
    if !any {
        return Err(Error::DegenerateSample);
    }
    Ok((lo, hi))
}

fn keeps_in_frame(a: &[f64], sample: &Sample) -> bool {
    let coeffs = CoeffVector(a.to_vec());
    let field = compute_shift_field(&coeffs, sample.cols());
    let rows = sample.rows() as f64;
    let surf = &sample.surfaces;
    (0..surf.slice_count()).all(|s| {
        (0..surf.cols()).all(|c| match surf.extent(s, c) {
            None => true,
            Some((top, bottom)) => {
                let sh = field.shifts()[c] as f64;
                top - sh >= 1.0 && bottom - sh <= rows
            }
        })
    })
}

fn draw_a0<R: Rng + ?Sized>(a: &mut [f64], lo: f64, hi: f64, sample: &Sample, rng: &mut R) -> f64 {
    if !(lo < hi) {
        return 0.0;
    }
    // The bounds are exact in real arithmetic; a draw landing within an ulp
    // of an edge can still round the wrong way, so check and redraw.
    for _ in 0..8 {
        let v = rng.gen_range(lo..hi);
        a[0] = v;
        if keeps_in_frame(a, sample) {
            return v;
        }
    }
    0.0
}
