//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use octaug::baseline::{horizontal_flip, random_affine, vertical_scale, AffineParams};
use octaug::fdda::{
    apply_field_to_volume, apply_to_image, apply_to_surfaces, apply_to_volume, compute_shift_field,
    sample_coeffs, CoeffVector, FddaRanges, ShiftField,
};
use octaug::io::{
    generate_phantom, read_surfaces, read_volume, write_surfaces, write_volume, PhantomSpec,
};
use octaug::metrics::{mad, subject_sd, SdKind};
use octaug::prlc::{apply_prlc, extract_patch, PrlcParams};
use octaug::rng::{rng_from_seed, AugRng};
use octaug::{BScan, Sample, SurfaceSet, Volume};
use rand::Rng;

use common::{bright_row_sample, random_phantom, read_tree};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn coeffs(a: &[f64]) -> CoeffVector {
    CoeffVector::new(a.to_vec()).unwrap()
}

// ---------------------------------------------------------------------------

fn shift_field_exactness() -> Outcome {
    let d = compute_shift_field(&coeffs(&[0.0, 1.0, 0.0]), 1024);
    let first = [d.delta()[0], d.delta()[512], d.delta()[1023]];
    let q = compute_shift_field(&coeffs(&[0.0, 0.0, 0.0002]), 1024);
    // |n2 - c2| = 500 at n2 = 13 and n2 = 1013
    let second = [q.delta()[12], q.delta()[1012]];
    let ok = first == [-512.0, 0.0, 511.0] && second == [50.0, 50.0];
    check(ok, format!("a=(0,1,0): {first:?}; a=(0,0,2e-4) at |t|=500: {second:?}"))
}

/// Independent gather: Δ by direct power sum, rounding by true floor.
fn naive_shift(a: &[f64], cols: usize) -> Vec<i64> {
    let c2 = (cols / 2 + 1) as f64;
    (1..=cols)
        .map(|n2| {
            let t = n2 as f64 - c2;
            let mut delta = a[0];
            for (k, ak) in a.iter().enumerate().skip(1) {
                delta += ak * t.powi(k as i32);
            }
            (delta + 0.5).floor() as i64
        })
        .collect()
}

fn naive_gather(img: &BScan, shifts: &[i64]) -> Vec<f32> {
    let (n1, n2) = (img.rows() as i64, img.cols());
    let mut out = vec![0.0f32; img.rows() * n2];
    for row in 1..=n1 {
        for col in 1..=n2 {
            let src = row + shifts[col - 1];
            if 1 <= src && src <= n1 {
                out[(row as usize - 1) * n2 + col - 1] = img.get(src as usize - 1, col - 1);
            }
        }
    }
    out
}

fn gather_oracle() -> Outcome {
    let mut rng = rng_from_seed(0x5eed_0001);
    let mut mismatches = 0;
    for _ in 0..200 {
        let rows = rng.gen_range(1..=64);
        let cols = rng.gen_range(1..=64);
        let img = BScan::from_fn(rows, cols, |_, _| rng.gen_range(-1.0f32..1.0));
        let a = [
            rng.gen_range(-20.0..20.0),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-0.05..0.05),
            rng.gen_range(-0.001..0.001),
        ];
        let field = compute_shift_field(&coeffs(&a), cols);
        let shifts = naive_shift(&a, cols);
        let out = apply_to_image(&img, &field).unwrap();
        let expect = naive_gather(&img, &shifts);
        let same = field.shifts() == shifts.as_slice()
            && out.data().iter().zip(&expect).all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} of 200 pairs differ from the naive gather"))
}

fn feature_tracking() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for (name, ranges, cols) in [("mshc", FddaRanges::mshc(), 1024), ("duke", FddaRanges::duke(), 768)] {
        let rows = 496;
        let sample = bright_row_sample(rows, cols, |c| {
            (248.0 + 40.0 * (c as f64 * 0.013).sin() + 0.00004 * (c as f64 - 400.0).powi(2)) as usize
        });
        let mut rng = rng_from_seed(0x5eed_0002);
        for draw in 0..100 {
            let a = sample_coeffs(&ranges, &sample, &mut rng).unwrap();
            let out = apply_to_volume(&sample, &a).unwrap();
            let img = &out.volume.slices[0];
            for c in 0..cols {
                let bright: Vec<usize> = (0..rows).filter(|&r| img.get(r, c) == 1.0).collect();
                let label = out.surfaces.get(0, 0, c);
                let ok = match label {
                    Some(p) => bright == vec![p as usize - 1] && p.fract() == 0.0,
                    None => bright.is_empty(),
                };
                checked += 1;
                if !ok {
                    failures.push(format!("{name} draw {draw} col {c}: label {label:?} bright {bright:?}"));
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{checked} columns over 200 draws, {} mismatches{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn round_trip() -> Outcome {
    let mut rng = rng_from_seed(0x5eed_0003);
    let mut bad = 0usize;
    let mut restored = 0usize;
    for _ in 0..100 {
        let rows = rng.gen_range(8..96);
        let cols = rng.gen_range(8..96);
        let img = BScan::from_fn(rows, cols, |_, _| rng.gen_range(0.001f32..1.0));
        let shifts: Vec<i64> = (0..cols).map(|_| rng.gen_range(-(rows as i64)..=rows as i64)).collect();
        let field = ShiftField::from_shifts(shifts.clone());
        let back = apply_to_image(&apply_to_image(&img, &field).unwrap(), &field.negated()).unwrap();
        for c in 0..cols {
            for r in 0..rows {
                // back(r) = out(r - s) = img(r), provided r - s is a row.
                let kept = (0..rows as i64).contains(&(r as i64 - shifts[c]));
                let v = back.get(r, c);
                if kept {
                    restored += 1;
                    if v.to_bits() != img.get(r, c).to_bits() {
                        bad += 1;
                    }
                } else if v != 0.0 {
                    bad += 1;
                }
            }
        }
    }
    check(bad == 0, format!("{restored} in-bounds-provenance pixels checked, {bad} wrong"))
}

fn volume_coherence() -> Outcome {
    let sample = generate_phantom(&PhantomSpec {
        slices: 8,
        rows: 256,
        cols: 192,
        thicknesses: vec![10.0, 14.0, 12.0, 16.0, 9.0],
        top: 90.0,
        curvature: 0.0008,
        slice_drift: 1.5,
        ..PhantomSpec::default()
    })
    .unwrap();
    let mut rng = rng_from_seed(0x5eed_0004);
    let ranges = FddaRanges {
        a2: octaug::fdda::Interval::symmetric(0.002),
        ..FddaRanges::mshc()
    };
    let mut bad = 0usize;
    for _ in 0..50 {
        let a = sample_coeffs(&ranges, &sample, &mut rng).unwrap();
        let out = apply_to_volume(&sample, &a).unwrap();
        let field = compute_shift_field(&a, sample.cols());
        for s in 0..8 {
            let img = apply_to_image(&sample.volume.slices[s], &field).unwrap();
            if !img.bit_eq(&out.volume.slices[s]) {
                bad += 1;
            }
            for b in 0..sample.surfaces.surface_count() {
                let line = apply_to_surfaces(sample.surfaces.line(s, b), &field, sample.rows()).unwrap();
                let same = line
                    .iter()
                    .zip(out.surfaces.line(s, b))
                    .all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits));
                if !same {
                    bad += 1;
                }
            }
        }
        if !apply_field_to_volume(&sample, &field).unwrap().bit_eq(&out) {
            bad += 1;
        }
    }
    check(bad == 0, format!("50 draws x 8 slices, {bad} slice/surface mismatches"))
}

/// Brute-force PRLC check for one application; returns a failure message.
fn prlc_violation(input: &Sample, out: &Sample, record: &octaug::prlc::PrlcRecord) -> Option<String> {
    let rows = input.rows();
    let surf = &input.surfaces;
    if record.l < 1 || record.l > 3 {
        return Some(format!("l = {}", record.l));
    }
    if record.width < 20 || record.width > input.cols() {
        return Some(format!("W = {}", record.width));
    }
    let patch = extract_patch(input, record.interval, record.start_col, record.width).unwrap();
    let mut pasted = vec![vec![false; rows * input.cols()]; input.slice_count()];
    for (s, cols) in patch.columns.iter().enumerate() {
        for (j, pc) in cols.iter().enumerate() {
            let Some(pc) = pc else { continue };
            let dc = record.anchor.col + j;
            let sc = record.start_col + j;
            for (k, _) in pc.values.iter().enumerate() {
                let sr = pc.top + k;
                let dr = sr as i64 + record.anchor.row_offset;
                if dr < 0 || dr >= rows as i64 {
                    return Some(format!("paste row {dr} outside image"));
                }
                let dr = dr as usize;
                let valid: Vec<f64> = (0..surf.surface_count()).filter_map(|b| surf.get(s, b, dc)).collect();
                if !valid.is_empty() {
                    let lo = valid.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = valid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let coord = (dr + 1) as f64;
                    if coord >= lo && coord <= hi {
                        return Some(format!("slice {s} pixel ({dr},{dc}) is labeled"));
                    }
                }
                let got = out.volume.slices[s].get(dr, dc);
                let src = input.volume.slices[s].get(sr, sc);
                if got.to_bits() != src.to_bits() {
                    return Some(format!("slice {s} pixel ({dr},{dc}) differs from source"));
                }
                pasted[s][dr * input.cols() + dc] = true;
            }
        }
    }
    for s in 0..input.slice_count() {
        for r in 0..rows {
            for c in 0..input.cols() {
                if !pasted[s][r * input.cols() + c]
                    && out.volume.slices[s].get(r, c).to_bits() != input.volume.slices[s].get(r, c).to_bits()
                {
                    return Some(format!("slice {s} pixel ({r},{c}) changed outside the paste"));
                }
            }
        }
    }
    None
}

fn prlc_safety() -> Outcome {
    let mut rng = rng_from_seed(0x5eed_0005);
    let params = PrlcParams::default();
    let (mut pasted, mut identity) = (0usize, 0usize);
    let mut failure = None;
    for i in 0..1000 {
        let sample = random_phantom(&mut rng);
        let mut aug_rng: AugRng = rng_from_seed(i as u64);
        let (out, record) = apply_prlc(&sample, &params, &mut aug_rng).unwrap();
        if !out.surfaces.bit_eq(&sample.surfaces) {
            failure = Some(format!("application {i}: labels changed"));
            break;
        }
        match record {
            Some(r) => {
                pasted += 1;
                if let Some(msg) = prlc_violation(&sample, &out, &r) {
                    failure = Some(format!("application {i}: {msg}"));
                    break;
                }
            }
            None => {
                identity += 1;
                if !out.bit_eq(&sample) {
                    failure = Some(format!("application {i}: no record but sample changed"));
                    break;
                }
            }
        }
    }
    // Retina filling every row: nowhere to paste.
    let full = generate_phantom(&PhantomSpec {
        rows: 60,
        cols: 48,
        slices: 2,
        thicknesses: vec![20.0, 19.0, 20.0],
        top: 1.0,
        curvature: 0.0,
        tilt: 0.0,
        slice_drift: 0.0,
        ..PhantomSpec::default()
    })
    .unwrap();
    let (out, record) = apply_prlc(&full, &params, &mut rng_from_seed(9)).unwrap();
    let full_ok = record.is_none() && out.bit_eq(&full);
    if !full_ok && failure.is_none() {
        failure = Some("full-retina phantom was modified".into());
    }
    let detail = format!(
        "1000 applications: {pasted} pasted, {identity} identity; full retina identity: {full_ok}{}",
        failure.as_ref().map(|f| format!("; {f}")).unwrap_or_default()
    );
    check(failure.is_none() && pasted > 500, detail)
}

fn brute_mad(pred: &SurfaceSet, gt: &SurfaceSet, res: f64) -> f64 {
    let mut per_surface = Vec::new();
    for b in 0..gt.surface_count() {
        let mut diffs = Vec::new();
        for s in 0..gt.slice_count() {
            for c in 0..gt.cols() {
                if let (Some(p), Some(g)) = (pred.get(s, b, c), gt.get(s, b, c)) {
                    diffs.push((p - g).abs());
                }
            }
        }
        if !diffs.is_empty() {
            per_surface.push(res * diffs.iter().sum::<f64>() / diffs.len() as f64);
        }
    }
    per_surface.iter().sum::<f64>() / per_surface.len() as f64
}

fn mad_correctness() -> Outcome {
    let mut gt = SurfaceSet::empty(4, 9, 50);
    let mut rng = rng_from_seed(0x5eed_0006);
    for s in 0..4 {
        for b in 0..9 {
            for c in 0..50 {
                gt.set(s, b, c, Some(60.0 + 20.0 * b as f64 + rng.gen_range(0.0..10.0)));
            }
        }
    }
    let mut pred = gt.clone();
    for s in 0..4 {
        for p in pred.slice_positions_mut(s).iter_mut().flatten() {
            *p += 1.0;
        }
    }
    let m39 = mad(&pred, &gt, 3.9).unwrap().overall;
    let m387 = mad(&pred, &gt, 3.87).unwrap().overall;
    let offsets_ok = (m39 - 3.9).abs() <= 1e-12 && (m387 - 3.87).abs() <= 1e-12;

    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (sl, sf, cols) = (rng.gen_range(1..4), rng.gen_range(1..6), rng.gen_range(1..12));
        let mut g = SurfaceSet::empty(sl, sf, cols);
        let mut p = SurfaceSet::empty(sl, sf, cols);
        for s in 0..sl {
            for b in 0..sf {
                for c in 0..cols {
                    let gv = rng.gen_bool(0.9).then(|| rng.gen_range(1.0..400.0));
                    let pv = rng.gen_bool(0.9).then(|| rng.gen_range(1.0..400.0));
                    g.set(s, b, c, gv);
                    p.set(s, b, c, pv);
                }
            }
            // one guaranteed evaluable column
            g.set(s, 0, 0, Some(10.0));
            p.set(s, 0, 0, Some(12.5));
        }
        let res = rng.gen_range(1.0..5.0);
        let got = mad(&p, &g, res).unwrap().overall;
        let want = brute_mad(&p, &g, res);
        worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
    }
    let sd = subject_sd(&[2.0, 4.0], SdKind::Population).unwrap();
    check(
        offsets_ok && worst <= 1e-9 && sd == 1.0,
        format!("+1 px: {m39} um @3.9, {m387} um @3.87; brute force worst rel err {worst:.2e} over 500; sd([2,4]) = {sd}"),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_octaug"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn pipeline_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let spec = root.join("phantom.toml");
    fs::write(
        &spec,
        r#"
name = "ph"
subjects = 6
seed = 11

[phantom]
rows = 160
cols = 128
slices = 3
thicknesses = [8.0, 10.0, 7.0, 12.0, 6.0]
top = 50.0
curvature = 0.001
"#,
    )
    .unwrap();
    let data = root.join("data");
    let run = || -> Result<(), String> {
        run_cli(&["gen-phantom", "--spec", spec.to_str().unwrap(), "--out", data.to_str().unwrap()])?;
        run_cli(&["validate", data.to_str().unwrap()])?;
        for name in ["a", "b", "c"] {
            let cfg = root.join(format!("{name}.toml"));
            fs::write(
                &cfg,
                format!(
                    r#"
input = "data"
output = "out_{name}"
seed = 2024
epochs = 3
order = ["flip", "vscale", "fdda", "prlc", "affine", "cutmix"]
preset = "duke"

[fdda]
probability = 0.5

[prlc]
probability = 0.5
"#
                ),
            )
            .unwrap();
        }
        run_cli(&["augment", "--config", root.join("a.toml").to_str().unwrap(), "--workers", "8"])?;
        run_cli(&["augment", "--config", root.join("b.toml").to_str().unwrap(), "--workers", "8"])?;
        run_cli(&["augment", "--config", root.join("c.toml").to_str().unwrap(), "--workers", "1"])?;
        Ok(())
    };
    if let Err(e) = run() {
        return check(false, e);
    }
    let a = read_tree(&root.join("out_a"));
    let b = read_tree(&root.join("out_b"));
    let c = read_tree(&root.join("out_c"));
    let bytes: usize = a.values().map(Vec::len).sum();
    check(
        a == b && a == c && a.len() > 6,
        format!(
            "{} files / {bytes} bytes; repeat identical: {}; 1 vs 8 workers identical: {}",
            a.len(),
            a == b,
            a == c
        ),
    )
}

fn baseline_properties() -> Outcome {
    let mut rng = rng_from_seed(0x5eed_0009);
    // flip twice
    let mut flip_ok = true;
    for _ in 0..50 {
        let s = random_phantom(&mut rng);
        flip_ok &= horizontal_flip(&horizontal_flip(&s)).bit_eq(&s);
    }

    // vertical scale f then 1/f on smooth phantoms
    let mut label_exact = 0usize;
    let mut label_total = 0usize;
    let mut label_worst = 0.0f64;
    let mut pixel_worst = 0.0f32;
    for i in 0..50 {
        let s = generate_phantom(&PhantomSpec {
            rows: 200,
            cols: 64,
            slices: 2,
            thicknesses: vec![12.0, 15.0, 10.0, 18.0],
            top: 60.0 + i as f64 * 0.37,
            curvature: 0.003,
            noise: 0.0,
            edge_softness: 2.0,
            ..PhantomSpec::default()
        })
        .unwrap();
        let f = rng.gen_range(0.9..=1.1);
        let back = vertical_scale(&vertical_scale(&s, f).unwrap(), 1.0 / f).unwrap();
        for sl in 0..2 {
            for b in 0..s.surfaces.surface_count() {
                for c in 0..64 {
                    if let (Some(x), Some(y)) = (s.surfaces.get(sl, b, c), back.surfaces.get(sl, b, c)) {
                        label_total += 1;
                        if x.to_bits() == y.to_bits() {
                            label_exact += 1;
                        }
                        label_worst = label_worst.max((x - y).abs());
                    }
                }
            }
            // Row r reads intermediate rows floor(r*f) and ceil(r*f); keep it
            // when those rows were themselves read from inside the image.
            for r in 0..200usize {
                let q1 = (r as f64 * f).ceil();
                if q1 > 199.0 || q1 / f > 199.0 {
                    continue;
                }
                for c in 0..64 {
                    let d = (back.volume.slices[sl].get(r, c) - s.volume.slices[sl].get(r, c)).abs();
                    pixel_worst = pixel_worst.max(d);
                }
            }
        }
    }
    let labels_ok = label_exact == label_total;

    // pure integer row translation against zero-order shift
    let mut affine_ok = true;
    for _ in 0..50 {
        let s = random_phantom(&mut rng);
        let ty = rng.gen_range(-12i32..=12) as f64;
        let a = random_affine(&s, &AffineParams::translation(ty, 0.0)).unwrap();
        let f = apply_to_volume(&s, &coeffs(&[-ty, 0.0, 0.0])).unwrap();
        affine_ok &= a.bit_eq(&f);
    }
    check(
        flip_ok && labels_ok && pixel_worst <= 0.02 && affine_ok,
        format!(
            "flip twice identity: {flip_ok}; vscale labels bitwise restored {label_exact}/{label_total} \
             (max dev {label_worst:.2e} px); vscale pixels max abs {pixel_worst:.4}; \
             translation == zero-order fdda: {affine_ok}"
        ),
    )
}

fn random_sample(rng: &mut AugRng, id: usize) -> Sample {
    let (sl, rows, cols, sf) = (
        rng.gen_range(1..4),
        rng.gen_range(1..40),
        rng.gen_range(1..40),
        rng.gen_range(1..6),
    );
    let slices = (0..sl)
        .map(|_| {
            BScan::from_fn(rows, cols, |_, _| match rng.gen_range(0..20) {
                0 => -0.0,
                1 => f32::MIN_POSITIVE / 8.0,
                _ => f32::from_bits(rng.gen::<u32>() & 0x3fff_ffff) - 1.0,
            })
        })
        .collect();
    let mut vol = Volume::new(slices, rng.gen_range(0.5..10.0), format!("s{id:03} \"µ\"")).unwrap();
    vol.metadata.insert("k".into(), format!("{}", rng.gen::<u64>()));
    let mut surf = SurfaceSet::empty(sl, sf, cols);
    for s in 0..sl {
        for b in 0..sf {
            for c in 0..cols {
                let v = rng.gen_bool(0.8).then(|| rng.gen_range(1.0..=rows as f64));
                surf.set(s, b, c, v);
            }
        }
    }
    Sample::new(vol, surf).unwrap()
}

fn io_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(0x5eed_0010);
    let mut bad = 0;
    let mut invalid = 0usize;
    for i in 0..100 {
        let s = random_sample(&mut rng, i);
        invalid += s.surfaces.positions().iter().filter(|p| p.is_none()).count();
        let vp = dir.path().join(format!("{i}.vol"));
        let sp = dir.path().join(format!("{i}.surf.json"));
        write_volume(&vp, &s.volume).unwrap();
        write_surfaces(&sp, &s.surfaces).unwrap();
        let back = Sample::new(read_volume(&vp).unwrap(), read_surfaces(&sp).unwrap()).unwrap();
        if !back.bit_eq(&s) || back.volume.metadata != s.volume.metadata {
            bad += 1;
        }
    }
    check(bad == 0, format!("100 samples ({invalid} INVALID entries), {bad} differ"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Outcome); 10] = [
        ("shift-field exactness", 1.0, shift_field_exactness),
        ("gather oracle equivalence", 5.0, gather_oracle),
        ("feature tracking", 10.0, feature_tracking),
        ("shift round trip", 5.0, round_trip),
        ("volume coherence", 5.0, volume_coherence),
        ("prlc safety suite", 30.0, prlc_safety),
        ("mad correctness", 5.0, mad_correctness),
        ("pipeline determinism", 60.0, pipeline_determinism),
        ("baseline properties", 10.0, baseline_properties),
        ("io round trip", 5.0, io_round_trip),
    ];
    let mut failed = 0;
    println!("acceptance: {} criteria", criteria.len());
    for (name, budget, f) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                ok: false,
                detail: format!("panicked: {msg}"),
            }
        });
        let elapsed = t0.elapsed();
        let in_time = elapsed <= Duration::from_secs_f64(budget);
        let ok = outcome.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.2} s / {budget} s budget{}]",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
