//! Domain types shared by every augmentation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cross-sectional image, rows along the axial direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BScan {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl BScan {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims(format!("empty B-scan {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{rows}x{cols} B-scan needs {} pixels, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "B-scan dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut img = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                img.data[r * cols + c] = f(r, c);
            }
        }
        img
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f32) {
        self.data[row * self.cols + col] = value;
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Bitwise equality, so NaN payloads and signed zeros count.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Centre pixel `(floor(N1/2)+1, floor(N2/2)+1)` in 1-based coordinates.
///
/// Only `c2` enters the shift polynomial; `c1` is kept for completeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Center {
    pub c1: usize,
    pub c2: usize,
}

impl Center {
    pub fn of(rows: usize, cols: usize) -> Self {
        Self {
            c1: rows / 2 + 1,
            c2: cols / 2 + 1,
        }
    }
}

/// A stack of equally sized B-scans with acquisition metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    pub slices: Vec<BScan>,
    /// Micrometres per pixel along the row axis.
    pub axial_resolution: f64,
    pub subject_id: String,
    pub metadata: BTreeMap<String, String>,
}

impl Volume {
    pub fn new(slices: Vec<BScan>, axial_resolution: f64, subject_id: impl Into<String>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::dims("volume has no slices"))?;
        let (rows, cols) = (first.rows(), first.cols());
        if let Some((i, s)) = slices
            .iter()
            .enumerate()
            .find(|(_, s)| s.rows() != rows || s.cols() != cols)
        {
            return Err(Error::dims(format!(
                "slice {i} is {}x{}, expected {rows}x{cols}",
                s.rows(),
                s.cols()
            )));
        }
        if !(axial_resolution > 0.0 && axial_resolution.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "axial resolution must be positive, got {axial_resolution}"
            )));
        }
        Ok(Self {
            slices,
            axial_resolution,
            subject_id: subject_id.into(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    pub fn rows(&self) -> usize {
        self.slices[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.slices[0].cols()
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.slices.len() == other.slices.len()
            && self.slices.iter().zip(&other.slices).all(|(a, b)| a.bit_eq(b))
            && self.axial_resolution.to_bits() == other.axial_resolution.to_bits()
            && self.subject_id == other.subject_id
            && self.metadata == other.metadata
    }
}

/// Boundary positions indexed `[slice][surface][column]`.
///
/// Each entry is a 1-based real row coordinate, or `None` where the boundary
/// is not labeled (the INVALID sentinel). Surfaces are ordered top to bottom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSet {
    slices: usize,
    surfaces: usize,
    cols: usize,
    names: Vec<String>,
    positions: Vec<Option<f64>>,
}

impl SurfaceSet {
    pub fn new(
        slices: usize,
        surfaces: usize,
        cols: usize,
        names: Vec<String>,
        positions: Vec<Option<f64>>,
    ) -> Result<Self> {
        if slices == 0 || surfaces == 0 || cols == 0 {
            return Err(Error::dims(format!(
                "surface set dims must be positive, got {slices}x{surfaces}x{cols}"
            )));
        }
        if names.len() != surfaces {
            return Err(Error::dims(format!(
                "{} surface names for {surfaces} surfaces",
                names.len()
            )));
        }
        if positions.len() != slices * surfaces * cols {
            return Err(Error::dims(format!(
                "expected {} positions, got {}",
                slices * surfaces * cols,
                positions.len()
            )));
        }
        if let Some(p) = positions.iter().flatten().find(|p| !p.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite surface position {p}")));
        }
        Ok(Self {
            slices,
            surfaces,
            cols,
            names,
            positions,
        })
    }

    /// All-INVALID set with generic names `S0`, `S1`, ...
    pub fn empty(slices: usize, surfaces: usize, cols: usize) -> Self {
        let names = (0..surfaces).map(|b| format!("S{b}")).collect();
        Self::new(slices, surfaces, cols, names, vec![None; slices * surfaces * cols])
            .expect("positive dims")
    }

    pub fn slice_count(&self) -> usize {
        self.slices
    }

    pub fn surface_count(&self) -> usize {
        self.surfaces
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.surfaces {
            return Err(Error::dims("surface name count"));
        }
        self.names = names;
        Ok(())
    }

    #[inline]
    fn index(&self, slice: usize, surface: usize, col: usize) -> usize {
        debug_assert!(slice < self.slices && surface < self.surfaces && col < self.cols);
        (slice * self.surfaces + surface) * self.cols + col
    }

    #[inline]
    pub fn get(&self, slice: usize, surface: usize, col: usize) -> Option<f64> {
        self.positions[self.index(slice, surface, col)]
    }

    #[inline]
    pub fn set(&mut self, slice: usize, surface: usize, col: usize, value: Option<f64>) {
        let i = self.index(slice, surface, col);
        self.positions[i] = value;
    }

    /// Positions of one surface in one slice, one entry per column.
    pub fn line(&self, slice: usize, surface: usize) -> &[Option<f64>] {
        let start = self.index(slice, surface, 0);
        &self.positions[start..start + self.cols]
    }

    pub fn line_mut(&mut self, slice: usize, surface: usize) -> &mut [Option<f64>] {
        let start = self.index(slice, surface, 0);
        &mut self.positions[start..start + self.cols]
    }

    /// All surfaces of one slice, `[surface][column]` flattened.
    pub fn slice_positions(&self, slice: usize) -> &[Option<f64>] {
        let n = self.surfaces * self.cols;
        &self.positions[slice * n..(slice + 1) * n]
    }

    pub fn slice_positions_mut(&mut self, slice: usize) -> &mut [Option<f64>] {
        let n = self.surfaces * self.cols;
        &mut self.positions[slice * n..(slice + 1) * n]
    }

    pub fn positions(&self) -> &[Option<f64>] {
        &self.positions
    }

    /// Topmost and bottommost valid positions at a column, if any.
    pub fn extent(&self, slice: usize, col: usize) -> Option<(f64, f64)> {
        let mut out: Option<(f64, f64)> = None;
        for b in 0..self.surfaces {
            if let Some(p) = self.get(slice, b, col) {
                out = Some(match out {
                    None => (p, p),
                    Some((lo, hi)) => (lo.min(p), hi.max(p)),
                });
            }
        }
        out
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.slices == other.slices
            && self.surfaces == other.surfaces
            && self.cols == other.cols
            && self.names == other.names
            && self
                .positions
                .iter()
                .zip(&other.positions)
                .all(|(a, b)| a.map(f64::to_bits) == b.map(f64::to_bits))
    }
}

/// Layers are the regions between adjacent surfaces: layer `i` lies between
/// surface `i` (above) and surface `i + 1` (below).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerTopology {
    surfaces: usize,
}

impl LayerTopology {
    pub fn new(surface_count: usize) -> Self {
        Self {
            surfaces: surface_count,
        }
    }

    pub fn of(surfaces: &SurfaceSet) -> Self {
        Self::new(surfaces.surface_count())
    }

    pub fn layer_count(&self) -> usize {
        self.surfaces.saturating_sub(1)
    }

    /// `(upper surface, lower surface)` bounding `layer`.
    pub fn bounds(&self, layer: usize) -> (usize, usize) {
        assert!(layer < self.layer_count(), "layer {layer} out of range");
        (layer, layer + 1)
    }
}

/// A volume together with its boundary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub volume: Volume,
    pub surfaces: SurfaceSet,
}

impl Sample {
    pub fn new(volume: Volume, surfaces: SurfaceSet) -> Result<Self> {
        if volume.slice_count() != surfaces.slice_count() || volume.cols() != surfaces.cols() {
            return Err(Error::dims(format!(
                "volume is {}x{}x{} but surfaces are {} slices x {} columns",
                volume.slice_count(),
                volume.rows(),
                volume.cols(),
                surfaces.slice_count(),
                surfaces.cols()
            )));
        }
        Ok(Self { volume, surfaces })
    }

    pub fn slice_count(&self) -> usize {
        self.volume.slice_count()
    }

    pub fn rows(&self) -> usize {
        self.volume.rows()
    }

    pub fn cols(&self) -> usize {
        self.volume.cols()
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.volume.bit_eq(&other.volume) && self.surfaces.bit_eq(&other.surfaces)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    SliceDims {
        slice: usize,
        rows: usize,
        cols: usize,
    },
    SurfaceDims {
        slices: usize,
        cols: usize,
    },
    BadResolution(f64),
    NonFinitePixel {
        slice: usize,
        row: usize,
        col: usize,
    },
    Ordering {
        slice: usize,
        upper: usize,
        lower: usize,
        col: usize,
    },
    OutOfRange {
        slice: usize,
        surface: usize,
        col: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::SliceDims { slice, rows, cols } => {
                write!(f, "slice {slice}: dimensions {rows}x{cols} differ from slice 0")
            }
            Violation::SurfaceDims { slices, cols } => write!(
                f,
                "surfaces cover {slices} slices x {cols} columns, volume differs"
            ),
            Violation::BadResolution(r) => write!(f, "axial resolution {r} is not positive"),
            Violation::NonFinitePixel { slice, row, col } => {
                write!(f, "slice {slice}: non-finite pixel at ({row}, {col})")
            }
            Violation::Ordering {
                slice,
                upper,
                lower,
                col,
            } => write!(
                f,
                "slice {slice}: surfaces {upper}-{lower} out of order at column {col}"
            ),
            Violation::OutOfRange {
                slice,
                surface,
                col,
                value,
            } => write!(
                f,
                "slice {slice}: surface {surface} at column {col} is {value}, outside the image"
            ),
        }
    }
}

/// Checks every sample invariant and lists the violations found.
///
/// Never fails: an empty list means the sample is consistent.
pub fn validate_sample(sample: &Sample) -> Vec<Violation> {
    let mut out = Vec::new();
    let vol = &sample.volume;
    let (rows, cols) = (vol.rows(), vol.cols());
    for (i, s) in vol.slices.iter().enumerate() {
        if s.rows() != rows || s.cols() != cols {
            out.push(Violation::SliceDims {
                slice: i,
                rows: s.rows(),
                cols: s.cols(),
            });
            continue;
        }
        if let Some(k) = s.data().iter().position(|v| !v.is_finite()) {
            out.push(Violation::NonFinitePixel {
                slice: i,
                row: k / cols,
                col: k % cols,
            });
        }
    }
    if !(vol.axial_resolution > 0.0 && vol.axial_resolution.is_finite()) {
        out.push(Violation::BadResolution(vol.axial_resolution));
    }
    let surf = &sample.surfaces;
    if surf.slice_count() != vol.slice_count() || surf.cols() != cols {
        out.push(Violation::SurfaceDims {
            slices: surf.slice_count(),
            cols: surf.cols(),
        });
        return out;
    }
    let max_row = rows as f64;
    for s in 0..surf.slice_count() {
        for b in 0..surf.surface_count() {
            for (c, p) in surf.line(s, b).iter().enumerate() {
                if let Some(p) = *p {
                    if !(1.0..=max_row).contains(&p) {
                        out.push(Violation::OutOfRange {
                            slice: s,
                            surface: b,
                            col: c,
                            value: p,
                        });
                    }
                }
            }
        }
        for b in 1..surf.surface_count() {
            let (upper, lower) = (surf.line(s, b - 1), surf.line(s, b));
            for c in 0..cols {
                if let (Some(u), Some(l)) = (upper[c], lower[c]) {
                    if u > l {
                        out.push(Violation::Ordering {
                            slice: s,
                            upper: b - 1,
                            lower: b,
                            col: c,
                        });
                    }
                }
            }
        }
    }
    out
}
