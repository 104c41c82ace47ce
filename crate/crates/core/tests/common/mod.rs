#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use octaug::io::{generate_phantom, PhantomSpec};
use octaug::rng::AugRng;
use octaug::{BScan, Sample, SurfaceSet, Volume};
use rand::Rng;

/// Single-slice sample with a value of 1.0 at one row per column on a zero
/// background; the label sits on that row's centre.
pub fn bright_row_sample(rows: usize, cols: usize, row_of: impl Fn(usize) -> usize) -> Sample {
    let img = BScan::from_fn(rows, cols, |r, c| if r == row_of(c) { 1.0 } else { 0.0 });
    let mut surf = SurfaceSet::empty(1, 1, cols);
    for c in 0..cols {
        surf.set(0, 0, c, Some((row_of(c) + 1) as f64));
    }
    Sample::new(Volume::new(vec![img], 3.9, "bright").unwrap(), surf).unwrap()
}

/// Random layered phantom with 2-5 layers, some INVALID columns and a
/// random size; retries until the draw is feasible.
pub fn random_phantom(rng: &mut AugRng) -> Sample {
    loop {
        let rows = rng.gen_range(48..160);
        let cols = rng.gen_range(16..120);
        let layers = rng.gen_range(2..6);
        let thicknesses: Vec<f64> = (0..layers).map(|_| rng.gen_range(2.0..9.0)).collect();
        let total: f64 = thicknesses.iter().sum();
        let spare = rows as f64 - total - 4.0;
        if spare < 4.0 {
            continue;
        }
        let spec = PhantomSpec {
            rows,
            cols,
            slices: rng.gen_range(1..4),
            thicknesses,
            top: rng.gen_range(2.0..spare),
            tilt: rng.gen_range(-0.2..0.2),
            curvature: rng.gen_range(-0.004..0.004),
            slice_drift: rng.gen_range(-1.0..1.0),
            noise: 0.05,
            seed: rng.gen(),
            ..PhantomSpec::default()
        };
        let Ok(mut s) = generate_phantom(&spec) else { continue };
        let invalid_runs = rng.gen_range(0..3);
        for _ in 0..invalid_runs {
            let sl = rng.gen_range(0..s.slice_count());
            let c0 = rng.gen_range(0..cols);
            let c1 = (c0 + rng.gen_range(1..8)).min(cols);
            let only = rng.gen_bool(0.5).then(|| rng.gen_range(0..s.surfaces.surface_count()));
            for c in c0..c1 {
                for b in 0..s.surfaces.surface_count() {
                    if only.map_or(true, |o| o == b) {
                        s.surfaces.set(sl, b, c, None);
                    }
                }
            }
        }
        return s;
    }
}

/// Every regular file under `root`, keyed by relative path.
pub fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(&p, root, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
