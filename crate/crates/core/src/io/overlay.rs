use std::path::Path;

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::types::Sample;

/// Boundary colours, cycled by surface index.
pub const PALETTE: [[u8; 3]; 10] = [
    [255, 215, 0],
    [0, 200, 0],
    [30, 144, 255],
    [255, 64, 64],
    [255, 0, 255],
    [0, 255, 255],
    [255, 140, 0],
    [160, 32, 240],
    [255, 255, 255],
    [128, 255, 0],
];

/// Grayscale slice with each boundary drawn at its rounded row.
pub fn overlay_image(sample: &Sample, slice: usize) -> Result<RgbImage> {
    if slice >= sample.slice_count() {
        return Err(Error::SliceOutOfRange {
            index: slice,
            count: sample.slice_count(),
        });
    }
    let img = &sample.volume.slices[slice];
    let (rows, cols) = (img.rows(), img.cols());
    let mut out = RgbImage::from_fn(cols as u32, rows as u32, |x, y| {
        let v = img.get(y as usize, x as usize);
        let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        Rgb([g, g, g])
    });
    let surf = &sample.surfaces;
    for b in 0..surf.surface_count() {
        let color = Rgb(PALETTE[b % PALETTE.len()]);
        for (c, p) in surf.line(slice, b).iter().enumerate() {
            let Some(p) = p else { continue };
            let r = (p + 0.5).floor() as i64 - 1;
            if (0..rows as i64).contains(&r) {
                out.put_pixel(c as u32, r as u32, color);
            }
        }
    }
    Ok(out)
}

pub fn render_overlay(sample: &Sample, slice: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    overlay_image(sample, slice)?
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}
