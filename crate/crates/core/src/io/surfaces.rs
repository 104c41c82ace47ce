use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::types::SurfaceSet;

pub const FORMAT: &str = "octaug-surfaces";
pub const VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    format: String,
    version: u32,
    slices: usize,
    surfaces: usize,
    columns: usize,
    names: Vec<String>,
    positions: Vec<Vec<Vec<Option<f64>>>>,
}

/// Writes JSON with one `[slice][surface]` line per row of text; INVALID
/// entries are `null`.
pub fn write_surfaces(path: impl AsRef<Path>, surfaces: &SurfaceSet) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"format\": \"{FORMAT}\",\n"));
    out.push_str(&format!("  \"version\": {VERSION},\n"));
    out.push_str(&format!("  \"slices\": {},\n", surfaces.slice_count()));
    out.push_str(&format!("  \"surfaces\": {},\n", surfaces.surface_count()));
    out.push_str(&format!("  \"columns\": {},\n", surfaces.cols()));
    out.push_str(&format!("  \"names\": {},\n", json(surfaces.names())));
    out.push_str("  \"positions\": [\n");
    w.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    for s in 0..surfaces.slice_count() {
        let mut block = String::from("    [\n");
        for b in 0..surfaces.surface_count() {
            block.push_str("      ");
            block.push_str(&json(surfaces.line(s, b)));
            block.push_str(if b + 1 < surfaces.surface_count() { ",\n" } else { "\n" });
        }
        block.push_str(if s + 1 < surfaces.slice_count() { "    ],\n" } else { "    ]\n" });
        w.write_all(block.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.write_all(b"  ]\n}\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("finite values serialize")
}

/// Reads a surface file. Ordering is not checked here; see
/// [`crate::validate_sample`].
pub fn read_surfaces(path: impl AsRef<Path>) -> Result<SurfaceSet> {
    let path = path.as_ref();
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let f: SurfaceFile = serde_json::from_slice(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if f.format != FORMAT || f.version != VERSION {
        return Err(Error::CorruptHeader {
            path: path.to_path_buf(),
            reason: format!("unsupported format {} v{}", f.format, f.version),
        });
    }
    let mismatch = |what: String| Error::dims(format!("{}: {what}", path.display()));
    if f.positions.len() != f.slices {
        return Err(mismatch(format!("{} slices declared, {} present", f.slices, f.positions.len())));
    }
    let mut flat = Vec::with_capacity(f.slices * f.surfaces * f.columns);
    for (s, slice) in f.positions.into_iter().enumerate() {
        if slice.len() != f.surfaces {
            return Err(mismatch(format!("slice {s} has {} surfaces, expected {}", slice.len(), f.surfaces)));
        }
        for (b, line) in slice.into_iter().enumerate() {
            if line.len() != f.columns {
                return Err(mismatch(format!(
                    "slice {s} surface {b} has {} columns, expected {}",
                    line.len(),
                    f.columns
                )));
            }
            flat.extend(line);
        }
    }
    SurfaceSet::new(f.slices, f.surfaces, f.columns, f.names, flat)
}
