//! On-disk formats, dataset manifests, phantoms and overlays.
//!
//! The byte layouts are documented in `FORMAT.md` at the repository root.

mod dataset;
mod overlay;
mod phantom;
mod surfaces;
mod volume;

pub use dataset::{Dataset, Manifest, Role, SubjectEntry, MANIFEST_FILE};
pub use overlay::{overlay_image, render_overlay, PALETTE};
pub use phantom::{generate_phantom, PhantomSpec};
pub use surfaces::{read_surfaces, write_surfaces};
pub use volume::{read_volume, write_volume, HEADER_LEN, MAGIC};
