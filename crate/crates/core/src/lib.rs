//! Label-consistent augmentation for layered OCT volumes.
//!
//! Every augmentation here transforms a [`Sample`] (a stack of B-scans plus
//! per-column boundary positions) into a new sample whose labels still
//! describe its pixels:
//!
//! * [`fdda`] shifts each image column vertically by a polynomial of the
//!   column offset from the image center, and shifts the labels with it.
//! * [`prlc`] copies a block of adjacent layers into the unlabeled
//!   background, leaving the labels untouched.
//! * [`baseline`] holds horizontal flip, vertical scaling, a random affine
//!   warp and CutMix for comparison runs.
//! * [`metrics`] computes mean absolute boundary distance in micrometres.
//! * [`io`] reads and writes the on-disk dataset format, generates phantoms
//!   and renders overlays.
//! * [`pipeline`] ties it together behind seeded, reproducible runs.
//!
//! # Index convention
//!
//! Pixel accessors take 0-based `(row, col)` array indices. Surface
//! positions are real-valued 1-based row coordinates: the centre of pixel
//! row `r` (0-based) sits at coordinate `r + 1`. Column `n2` of the
//! polynomial shift formulas is the 1-based column `col + 1`.

pub mod baseline;
pub mod error;
pub mod fdda;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod prlc;
pub mod rng;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    validate_sample, BScan, Center, LayerTopology, Sample, SurfaceSet, Violation, Volume,
};
