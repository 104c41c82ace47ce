//! Seeded augmentation runs and the commands behind the `octaug` binary.

mod augment;
mod commands;
mod config;
mod preview;

pub use augment::{
    apply_step, augment_sample, epoch_dir, read_provenance, replay, run_augment, ProvenanceRecord,
    RunSummary, Step, PROVENANCE_FILE,
};
pub use commands::{
    dataset_from_samples, load_surface_map, run_eval, run_gen_phantom, run_validate,
    PhantomDatasetSpec, ValidationReport, EVAL_REPORT_FILE,
};
pub use config::{
    AffineSection, AugKind, CutmixSection, FddaSection, FlipSection, PipelineConfig, Preset,
    PrlcSection, VscaleSection,
};
pub use preview::{parse_aug_spec, run_preview, AugSpec, PreviewOp};
