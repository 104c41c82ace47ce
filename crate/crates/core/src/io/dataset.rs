use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_surfaces, read_volume, write_surfaces, write_volume};
use crate::error::{Error, Result};
use crate::types::{Sample, SurfaceSet, Volume};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Val,
    Test,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectEntry {
    pub id: String,
    pub role: Role,
    /// Paths are relative to the dataset directory.
    pub volume: String,
    pub surfaces: String,
    /// Opaque per-slice mask file, copied verbatim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<u32>,
}

impl SubjectEntry {
    /// Entry using the default file names for `id`.
    pub fn standard(id: impl Into<String>, role: Role) -> Self {
        let id = id.into();
        Self {
            volume: format!("{id}.vol"),
            surfaces: format!("{id}.surf.json"),
            id,
            role,
            mask: None,
            fold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub name: String,
    pub axial_resolution_um: f64,
    pub slices: usize,
    pub rows: usize,
    pub cols: usize,
    pub surface_count: usize,
    pub surface_names: Vec<String>,
    pub subjects: Vec<SubjectEntry>,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_slice(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if m.format_version != MANIFEST_VERSION {
            return Err(Error::CorruptHeader {
                path: path.to_path_buf(),
                reason: format!("unsupported manifest version {}", m.format_version),
            });
        }
        if m.surface_names.len() != m.surface_count {
            return Err(Error::dims(format!(
                "{}: {} surface names for {} surfaces",
                path.display(),
                m.surface_names.len(),
                m.surface_count
            )));
        }
        Ok(m)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn subject(&self, id: &str) -> Option<&SubjectEntry> {
        self.subjects.iter().find(|s| s.id == id)
    }
}

/// A dataset directory: `manifest.json` plus per-subject files.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: Manifest,
}

impl Dataset {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let manifest = Manifest::read(root.join(MANIFEST_FILE))?;
        Ok(Self { root, manifest })
    }

    pub fn len(&self) -> usize {
        self.manifest.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.subjects.is_empty()
    }

    pub fn path_of(&self, relative: &str) -> PathBuf {
        self.root.join(relative)
    }

    fn check_surfaces(&self, surf: &SurfaceSet, entry: &SubjectEntry) -> Result<()> {
        let m = &self.manifest;
        if surf.slice_count() != m.slices || surf.cols() != m.cols || surf.surface_count() != m.surface_count {
            return Err(Error::dims(format!(
                "{}: surfaces are {}x{}x{}, manifest declares {}x{}x{}",
                entry.surfaces,
                surf.slice_count(),
                surf.surface_count(),
                surf.cols(),
                m.slices,
                m.surface_count,
                m.cols
            )));
        }
        Ok(())
    }

    pub fn load_surfaces(&self, index: usize) -> Result<SurfaceSet> {
        let entry = &self.manifest.subjects[index];
        let surf = read_surfaces(self.path_of(&entry.surfaces))?;
        self.check_surfaces(&surf, entry)?;
        Ok(surf)
    }

    pub fn load_volume(&self, index: usize) -> Result<Volume> {
        let entry = &self.manifest.subjects[index];
        let vol = read_volume(self.path_of(&entry.volume))?;
        let m = &self.manifest;
        if vol.slice_count() != m.slices || vol.rows() != m.rows || vol.cols() != m.cols {
            return Err(Error::dims(format!(
                "{}: volume is {}x{}x{}, manifest declares {}x{}x{}",
                entry.volume,
                vol.slice_count(),
                vol.rows(),
                vol.cols(),
                m.slices,
                m.rows,
                m.cols
            )));
        }
        Ok(vol)
    }

    pub fn load_sample(&self, index: usize) -> Result<Sample> {
        Sample::new(self.load_volume(index)?, self.load_surfaces(index)?)
    }

    /// Writes one subject's files under `root` using the entry's paths.
    pub fn write_sample(root: impl AsRef<Path>, entry: &SubjectEntry, sample: &Sample) -> Result<()> {
        let root = root.as_ref();
        write_volume(root.join(&entry.volume), &sample.volume)?;
        write_surfaces(root.join(&entry.surfaces), &sample.surfaces)
    }

    /// Writes a complete dataset directory.
    pub fn create(root: impl AsRef<Path>, manifest: &Manifest, samples: &[Sample]) -> Result<Self> {
        let root = root.as_ref();
        if samples.len() != manifest.subjects.len() {
            return Err(Error::dims("sample count differs from manifest subjects"));
        }
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        for (entry, sample) in manifest.subjects.iter().zip(samples) {
            Self::write_sample(root, entry, sample)?;
        }
        manifest.write(root.join(MANIFEST_FILE))?;
        Dataset::open(root)
    }
}
