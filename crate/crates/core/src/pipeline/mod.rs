//! Dataset expansion: every original plus `copies` augmented variants,
//! PNG images on disk and a manifest that records how each was made.

mod augment;
mod manifest;
mod render_set;
mod verify;

pub use augment::{
    augment_dataset, augment_sample, augment_variants, AugmentConfig, DEFAULT_COPIES,
};
pub use manifest::{
    augmented_id, image_rel_path, Manifest, ManifestEntry, ManifestHeader, MANIFEST_FILE,
    MANIFEST_FORMAT, MANIFEST_VERSION,
};
pub use render_set::{render_dataset, RenderConfig, RenderReport};
pub use verify::{verify_manifest, Rederive, VerifyReport, Violation, ViolationKind};

pub use augment::worker_pool;
