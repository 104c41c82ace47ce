use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BScan, Volume};

pub const MAGIC: [u8; 8] = *b"OCTAUGV\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeMeta {
    subject_id: String,
    metadata: BTreeMap<String, String>,
}

/// Writes header, little-endian `f32` payload in `(slice, row, column)`
/// order, then a UTF-8 JSON block with subject id and metadata.
pub fn write_volume(path: impl AsRef<Path>, volume: &Volume) -> Result<()> {
    let path = path.as_ref();
    let meta = serde_json::to_vec(&VolumeMeta {
        subject_id: volume.subject_id.clone(),
        metadata: volume.metadata.clone(),
    })
    .map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| Error::dims(format!("dimension {v} exceeds u32")))
    };
    let mut header = [0u8; HEADER_LEN];
    header[0..8].copy_from_slice(&MAGIC);
    header[8..12].copy_from_slice(&VERSION.to_le_bytes());
    header[12..16].copy_from_slice(&dim(volume.slice_count())?.to_le_bytes());
    header[16..20].copy_from_slice(&dim(volume.rows())?.to_le_bytes());
    header[20..24].copy_from_slice(&dim(volume.cols())?.to_le_bytes());
    header[24..32].copy_from_slice(&volume.axial_resolution.to_le_bytes());
    header[32..36].copy_from_slice(&dim(meta.len())?.to_le_bytes());

    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    write(&header)?;
    for img in &volume.slices {
        let mut buf = Vec::with_capacity(img.data().len() * 4);
        for v in img.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        write(&buf)?;
    }
    write(&meta)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b.try_into().expect("4 bytes"))
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<Volume> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let corrupt = |reason: &str| Error::CorruptHeader {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("file shorter than the 64-byte header"));
    }
    if bytes[0..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = le_u32(&bytes[8..12]);
    if version != VERSION {
        return Err(corrupt(&format!("unsupported version {version}")));
    }
    let slices = le_u32(&bytes[12..16]) as usize;
    let rows = le_u32(&bytes[16..20]) as usize;
    let cols = le_u32(&bytes[20..24]) as usize;
    let resolution = f64::from_le_bytes(bytes[24..32].try_into().expect("8 bytes"));
    let meta_len = le_u32(&bytes[32..36]) as usize;
    if bytes[36..HEADER_LEN].iter().any(|&b| b != 0) {
        return Err(corrupt("reserved header bytes are not zero"));
    }
    if slices == 0 || rows == 0 || cols == 0 {
        return Err(corrupt("zero dimension"));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(corrupt("axial resolution is not positive"));
    }
    let pixels = slices
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(cols))
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    let payload = pixels * 4;
    let expected = (HEADER_LEN + payload + meta_len) as u64;
    let found = bytes.len() as u64;
    if found != expected {
        // Whole missing or extra values mean the payload disagrees with the
        // declared dims; a partial value means the file was cut short.
        let diff = expected.abs_diff(found);
        if found < expected && diff % 4 != 0 {
            return Err(Error::TruncatedPayload {
                path: path.to_path_buf(),
                expected,
                found,
            });
        }
        return Err(Error::dims(format!(
            "{}: header declares {slices}x{rows}x{cols} ({expected} bytes) but file has {found} bytes",
            path.display()
        )));
    }
    let body = &bytes[HEADER_LEN..HEADER_LEN + payload];
    let per_slice = rows * cols * 4;
    let images = body
        .chunks_exact(per_slice)
        .map(|chunk| {
            let data = chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")))
                .collect();
            BScan::new(rows, cols, data)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta: VolumeMeta = serde_json::from_slice(&bytes[HEADER_LEN + payload..])
        .map_err(|_| corrupt("metadata block is not valid JSON"))?;
    let mut volume = Volume::new(images, resolution, meta.subject_id)?;
    volume.metadata = meta.metadata;
    Ok(volume)
}
