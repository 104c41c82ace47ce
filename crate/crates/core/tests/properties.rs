mod common;

use common::random_phantom;
use octaug::baseline::{cutmix, horizontal_flip, vertical_scale};
use octaug::io::{read_surfaces, read_volume, write_surfaces, write_volume};
use octaug::metrics::mad;
use octaug::prlc::{apply_prlc, PrlcParams};
use octaug::rng::rng_from_seed;
use octaug::{Sample, SurfaceSet};
use proptest::prelude::*;

fn phantom(seed: u64) -> Sample {
    random_phantom(&mut rng_from_seed(seed))
}

/// Copy of `s` with every valid label moved by a per-entry offset.
fn jittered(s: &SurfaceSet, seed: u64) -> SurfaceSet {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let mut out = s.clone();
    for sl in 0..out.slice_count() {
        for v in out.slice_positions_mut(sl).iter_mut().flatten() {
            *v += rng.gen_range(-4.0..4.0);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flip_twice_is_identity(seed in any::<u64>()) {
        let s = phantom(seed);
        prop_assert!(horizontal_flip(&horizontal_flip(&s)).bit_eq(&s));
    }

    #[test]
    fn prlc_keeps_labels_and_writes_only_unlabeled_pixels(seed in any::<u64>(), draw in any::<u64>()) {
        let s = phantom(seed);
        let (out, _) = apply_prlc(&s, &PrlcParams::default(), &mut rng_from_seed(draw)).unwrap();
        prop_assert!(out.surfaces.bit_eq(&s.surfaces));
        for sl in 0..s.slice_count() {
            for c in 0..s.cols() {
                let extent = s.surfaces.extent(sl, c);
                for r in 0..s.rows() {
                    let changed = out.volume.slices[sl].get(r, c).to_bits() != s.volume.slices[sl].get(r, c).to_bits();
                    if changed {
                        let coord = (r + 1) as f64;
                        prop_assert!(!extent.is_some_and(|(lo, hi)| coord >= lo && coord <= hi));
                    }
                }
            }
        }
    }

    #[test]
    fn mad_is_symmetric_nonnegative_and_scales(seed in any::<u64>(), jitter in any::<u64>(), k in 0.5f64..8.0) {
        let gt = phantom(seed).surfaces;
        let pred = jittered(&gt, jitter);
        let ab = mad(&pred, &gt, 3.87).unwrap();
        let ba = mad(&gt, &pred, 3.87).unwrap();
        prop_assert!(ab.overall >= 0.0);
        prop_assert_eq!(ab.overall.to_bits(), ba.overall.to_bits());
        let scaled = mad(&pred, &gt, 3.87 * k).unwrap();
        prop_assert!((scaled.overall - k * ab.overall).abs() <= 1e-9 * scaled.overall.max(1.0));
        prop_assert_eq!(mad(&gt, &gt, 3.87).unwrap().overall, 0.0);
    }

    #[test]
    fn cutmix_labels_come_from_either_input(seed in any::<u64>(), draw in any::<u64>()) {
        let a = phantom(seed);
        let mut b = a.clone();
        b.surfaces = jittered(&a.surfaces, draw);
        let (out, rect) = cutmix(&a, &b, &mut rng_from_seed(draw)).unwrap();
        prop_assert!(rect.rows[1] <= a.rows() && rect.cols[1] <= a.cols());
        prop_assert!(rect.rows[0] <= rect.rows[1] && rect.cols[0] <= rect.cols[1]);
        for sl in 0..a.slice_count() {
            for k in 0..a.surfaces.surface_count() {
                for c in 0..a.cols() {
                    let got = out.surfaces.get(sl, k, c);
                    prop_assert!(got.is_none() || got == a.surfaces.get(sl, k, c) || got == b.surfaces.get(sl, k, c));
                }
            }
        }
    }

    #[test]
    fn vertical_scale_round_trip_is_within_rounding(seed in any::<u64>(), f in 0.9f64..1.1) {
        let s = phantom(seed);
        let back = vertical_scale(&vertical_scale(&s, f).unwrap(), 1.0 / f).unwrap();
        for sl in 0..s.slice_count() {
            let orig = s.surfaces.slice_positions(sl);
            let mid = vertical_scale(&s, f).unwrap();
            for (i, (o, r)) in orig.iter().zip(back.surfaces.slice_positions(sl)).enumerate() {
                if mid.surfaces.slice_positions(sl)[i].is_some() {
                    prop_assert!((o.unwrap() - r.unwrap()).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn files_round_trip_bitwise(seed in any::<u64>()) {
        let s = phantom(seed);
        let dir = tempfile::tempdir().unwrap();
        write_volume(dir.path().join("a.vol"), &s.volume).unwrap();
        write_surfaces(dir.path().join("a.surf.json"), &s.surfaces).unwrap();
        prop_assert!(read_volume(dir.path().join("a.vol")).unwrap().bit_eq(&s.volume));
        prop_assert!(read_surfaces(dir.path().join("a.surf.json")).unwrap().bit_eq(&s.surfaces));
    }
}
