use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::types::{BScan, Center, Sample, SurfaceSet, Volume};

/// Layered synthetic sample with analytically known boundaries.
///
/// The top boundary at column `n2` of slice `s` is
/// `top + tilt*t + curvature*t^2 + slice_drift*(s - (S-1)/2)` with
/// `t = n2 - c2`; each further boundary sits `thickness` rows below the
/// previous one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhantomSpec {
    pub rows: usize,
    pub cols: usize,
    pub slices: usize,
    pub thicknesses: Vec<f64>,
    pub top: f64,
    pub tilt: f64,
    pub curvature: f64,
    pub slice_drift: f64,
    /// One intensity per layer; cycles when shorter than the layer count.
    pub layer_intensities: Vec<f32>,
    /// Intensity above the top and below the bottom boundary.
    pub background: [f32; 2],
    /// Half-width of uniform additive noise.
    pub noise: f32,
    /// Width of the smooth step at each boundary, in rows; 0 gives hard edges.
    pub edge_softness: f64,
    pub resolution: f64,
    pub seed: u64,
    pub subject_id: String,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            rows: 496,
            cols: 768,
            slices: 4,
            thicknesses: vec![22.0, 30.0, 26.0, 34.0, 24.0, 40.0, 12.0, 18.0],
            top: 140.0,
            tilt: 0.0,
            curvature: 0.0001,
            slice_drift: 0.5,
            layer_intensities: vec![0.55, 0.3, 0.7, 0.35, 0.6, 0.25, 0.9, 0.65],
            background: [0.04, 0.12],
            noise: 0.03,
            edge_softness: 0.0,
            resolution: 3.87,
            seed: 0,
            subject_id: "phantom".into(),
        }
    }
}

impl PhantomSpec {
    /// A 3-slice 96x64 phantom for fast tests.
    pub fn small() -> Self {
        Self {
            rows: 96,
            cols: 64,
            slices: 3,
            thicknesses: vec![6.0, 8.0, 5.0, 7.0],
            top: 30.0,
            curvature: 0.002,
            ..Self::default()
        }
    }

    pub fn surface_count(&self) -> usize {
        self.thicknesses.len() + 1
    }
}

fn smooth_step(x: f64, width: f64) -> f64 {
    if width <= 0.0 {
        if x >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 / (1.0 + (-x / width).exp())
    }
}

pub fn generate_phantom(spec: &PhantomSpec) -> Result<Sample> {
    if spec.rows == 0 || spec.cols == 0 || spec.slices == 0 {
        return Err(Error::InfeasibleSpec("dimensions must be positive".into()));
    }
    if spec.thicknesses.is_empty() || spec.thicknesses.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InfeasibleSpec("layer thicknesses must be positive".into()));
    }
    let total: f64 = spec.thicknesses.iter().sum();
    if total > spec.rows as f64 - 1.0 {
        return Err(Error::InfeasibleSpec(format!(
            "{total} rows of layers do not fit in {} rows",
            spec.rows
        )));
    }
    let b = spec.surface_count();
    let c2 = Center::of(spec.rows, spec.cols).c2 as f64;
    let mid_slice = (spec.slices as f64 - 1.0) / 2.0;
    let mut surfaces = SurfaceSet::empty(spec.slices, b, spec.cols);
    let names = default_names(b);
    surfaces.set_names(names)?;
    for s in 0..spec.slices {
        for col in 0..spec.cols {
            let t = (col + 1) as f64 - c2;
            let mut y = spec.top + spec.tilt * t + spec.curvature * t * t + spec.slice_drift * (s as f64 - mid_slice);
            for k in 0..b {
                if k > 0 {
                    y += spec.thicknesses[k - 1];
                }
                if !(1.0..=spec.rows as f64).contains(&y) {
                    return Err(Error::InfeasibleSpec(format!(
                        "boundary {k} at column {col} of slice {s} lands at row {y:.2}, outside [1, {}]",
                        spec.rows
                    )));
                }
                surfaces.set(s, k, col, Some(y));
            }
        }
    }

    let layer_value = |i: usize| -> f64 {
        if spec.layer_intensities.is_empty() {
            0.5
        } else {
            spec.layer_intensities[i % spec.layer_intensities.len()] as f64
        }
    };
    // Intensity levels from top: background, layers..., bottom background.
    let mut levels = vec![spec.background[0] as f64];
    levels.extend((0..b - 1).map(layer_value));
    levels.push(spec.background[1] as f64);

    let mut rng = rng_from_seed(spec.seed);
    let mut slices = Vec::with_capacity(spec.slices);
    for s in 0..spec.slices {
        let mut img = BScan::zeros(spec.rows, spec.cols);
        for col in 0..spec.cols {
            for r in 0..spec.rows {
                let y = (r + 1) as f64;
                let mut v = levels[0];
                for k in 0..b {
                    let edge = surfaces.get(s, k, col).expect("set above");
                    v += (levels[k + 1] - levels[k]) * smooth_step(y - edge, spec.edge_softness);
                }
                img.set(r, col, v as f32);
            }
        }
        if spec.noise > 0.0 {
            for v in img.data_mut() {
                *v = (*v + rng.gen_range(-spec.noise..=spec.noise)).clamp(0.0, 1.0);
            }
        }
        slices.push(img);
    }
    let mut volume = Volume::new(slices, spec.resolution, spec.subject_id.clone())?;
    volume.metadata.insert("source".into(), "phantom".into());
    Sample::new(volume, surfaces)
}

fn default_names(count: usize) -> Vec<String> {
    const NAMES: [&str; 10] = [
        "ILM", "RNFL-GCL", "IPL-INL", "INL-OPL", "OPL-ONL", "ELM", "IS-OS", "OS-RPE", "BM", "CHR",
    ];
    if count <= NAMES.len() {
        NAMES[..count].iter().map(|s| s.to_string()).collect()
    } else {
        (0..count).map(|i| format!("S{i}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdda::{apply_to_volume, CoeffVector};
    use crate::types::validate_sample;

    #[test]
    fn flat_layers_at_known_rows() {
        let spec = PhantomSpec {
            thicknesses: vec![20.0; 8],
            top: 100.0,
            curvature: 0.0,
            slice_drift: 0.0,
            rows: 496,
            cols: 32,
            slices: 2,
            ..PhantomSpec::default()
        };
        let s = generate_phantom(&spec).unwrap();
        assert_eq!(s.surfaces.surface_count(), 9);
        for sl in 0..2 {
            for k in 0..9 {
                assert!(s.surfaces.line(sl, k).iter().all(|p| *p == Some(100.0 + 20.0 * k as f64)));
            }
        }
        assert!(validate_sample(&s).is_empty());
    }

    #[test]
    fn too_many_layers_is_infeasible() {
        let spec = PhantomSpec {
            thicknesses: vec![100.0; 6],
            ..PhantomSpec::default()
        };
        assert!(matches!(generate_phantom(&spec), Err(Error::InfeasibleSpec(_))));
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = PhantomSpec::small();
        let a = generate_phantom(&spec).unwrap();
        let b = generate_phantom(&spec).unwrap();
        assert!(a.bit_eq(&b));
        let c = generate_phantom(&PhantomSpec { seed: 1, ..spec }).unwrap();
        assert!(!a.volume.bit_eq(&c.volume));
    }

    #[test]
    fn curvature_is_flattened_by_matching_second_order_shift() {
        let c = 0.0003;
        let spec = PhantomSpec {
            curvature: c,
            slice_drift: 0.0,
            top: 150.0,
            ..PhantomSpec::default()
        };
        let s = generate_phantom(&spec).unwrap();
        let out = apply_to_volume(&s, &CoeffVector::new(vec![0.0, 0.0, c]).unwrap()).unwrap();
        for p in out.surfaces.line(0, 0) {
            let p = p.expect("stays in frame");
            assert!((p - 150.0).abs() <= 0.5, "{p}");
        }
    }

    #[test]
    fn hard_edges_follow_boundaries() {
        let spec = PhantomSpec {
            noise: 0.0,
            slice_drift: 0.0,
            curvature: 0.0,
            top: 20.0,
            ..PhantomSpec::small()
        };
        let s = generate_phantom(&spec).unwrap();
        let img = &s.volume.slices[0];
        assert_eq!(img.get(18, 5), spec.background[0]);
        assert_eq!(img.get(19, 5), spec.layer_intensities[0]);
    }
}
