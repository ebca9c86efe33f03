use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::manifest::{augmented_id, Manifest, ManifestEntry};
use crate::digest::content_digest;
use crate::image::Image;
use crate::sample::Origin;
use crate::sampler::{params_for, RngState};
use crate::transforms::{apply_chain_with, AugmentationParams};

/// How many augmented images to regenerate from their recorded seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rederive {
    None,
    /// One augmented entry, picked by a generator keyed with this seed.
    One {
        pick_seed: u64,
    },
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    DuplicateId,
    /// Entry count differs from `(1 + copies) × originals`.
    Count {
        expected: usize,
        actual: usize,
    },
    /// Original has the wrong number of copies.
    CopyCount {
        expected: usize,
        actual: usize,
    },
    DanglingParent(String),
    BadOrigin(String),
    LabelMismatch,
    MissingFile(String),
    DigestMismatch {
        recorded: String,
        actual: String,
    },
    MissingParams,
    UnexpectedParams,
    ParamOutOfRange {
        field: &'static str,
        value: f64,
    },
    /// Recorded parameters differ from those derived from the seed.
    ParamsNotDerived,
    /// Regenerated image hashes differently from the recorded digest.
    ReplayMismatch,
    Unreadable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Empty for manifest-wide problems.
    pub sample_id: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = if self.sample_id.is_empty() {
            "<manifest>"
        } else {
            &self.sample_id
        };
        match &self.kind {
            ViolationKind::DuplicateId => write!(f, "{id}: duplicate sample id"),
            ViolationKind::Count { expected, actual } => {
                write!(f, "{id}: {actual} entries, expected {expected}")
            }
            ViolationKind::CopyCount { expected, actual } => {
                write!(f, "{id}: {actual} augmented copies, expected {expected}")
            }
            ViolationKind::DanglingParent(p) => write!(f, "{id}: parent {p} not in manifest"),
            ViolationKind::BadOrigin(m) => write!(f, "{id}: {m}"),
            ViolationKind::LabelMismatch => write!(f, "{id}: label differs from parent"),
            ViolationKind::MissingFile(p) => write!(f, "{id}: missing file {p}"),
            ViolationKind::DigestMismatch { recorded, actual } => {
                write!(
                    f,
                    "{id}: digest {actual} does not match recorded {recorded}"
                )
            }
            ViolationKind::MissingParams => write!(f, "{id}: augmented entry without params"),
            ViolationKind::UnexpectedParams => write!(f, "{id}: original entry with params"),
            ViolationKind::ParamOutOfRange { field, value } => {
                write!(f, "{id}: {field} = {value} out of range")
            }
            ViolationKind::ParamsNotDerived => {
                write!(f, "{id}: params differ from seed derivation")
            }
            ViolationKind::ReplayMismatch => write!(f, "{id}: regenerated image differs"),
            ViolationKind::Unreadable(m) => write!(f, "{id}: {m}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checked_entries: usize,
    pub replayed: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn push(out: &mut Vec<Violation>, id: &str, kind: ViolationKind) {
    out.push(Violation {
        sample_id: id.to_string(),
        kind,
    });
}

fn structural(manifest: &Manifest, out: &mut Vec<Violation>) {
    let mut ids: HashMap<&str, &ManifestEntry> = HashMap::new();
    for e in &manifest.entries {
        if ids.insert(&e.sample_id, e).is_some() {
            push(out, &e.sample_id, ViolationKind::DuplicateId);
        }
    }
    let originals = manifest.original_entries().count();
    let expected = originals * (1 + manifest.copies_per_sample as usize);
    if manifest.entries.len() != expected {
        push(
            out,
            "",
            ViolationKind::Count {
                expected,
                actual: manifest.entries.len(),
            },
        );
    }
    let mut copies: BTreeMap<&str, usize> = manifest
        .original_entries()
        .map(|e| (e.sample_id.as_str(), 0))
        .collect();
    for e in &manifest.entries {
        match e.origin {
            Origin::Original => {
                if e.parent_id.is_some() {
                    push(
                        out,
                        &e.sample_id,
                        ViolationKind::BadOrigin("original with a parent".into()),
                    );
                }
                if e.params.is_some() {
                    push(out, &e.sample_id, ViolationKind::UnexpectedParams);
                }
            }
            Origin::Augmented(k) => {
                if k > manifest.copies_per_sample {
                    push(
                        out,
                        &e.sample_id,
                        ViolationKind::BadOrigin(format!(
                            "copy index {k} exceeds {}",
                            manifest.copies_per_sample
                        )),
                    );
                }
                match e.parent_id.as_deref().map(|p| (p, ids.get(p))) {
                    None => push(
                        out,
                        &e.sample_id,
                        ViolationKind::BadOrigin("augmented entry without parent".into()),
                    ),
                    Some((p, None)) => {
                        push(out, &e.sample_id, ViolationKind::DanglingParent(p.into()))
                    }
                    Some((p, Some(parent))) => {
                        if parent.origin != Origin::Original {
                            push(out, &e.sample_id, ViolationKind::DanglingParent(p.into()));
                        } else {
                            *copies.entry(p).or_default() += 1;
                            if parent.label != e.label {
                                push(out, &e.sample_id, ViolationKind::LabelMismatch);
                            }
                            if e.sample_id != augmented_id(p, k) {
                                push(
                                    out,
                                    &e.sample_id,
                                    ViolationKind::BadOrigin(
                                        "id does not match parent and copy index".into(),
                                    ),
                                );
                            }
                        }
                    }
                }
                match &e.params {
                    None => push(out, &e.sample_id, ViolationKind::MissingParams),
                    Some(p) => {
                        for v in p.range_violations() {
                            push(
                                out,
                                &e.sample_id,
                                ViolationKind::ParamOutOfRange {
                                    field: v.field,
                                    value: v.value,
                                },
                            );
                        }
                        if let Some(parent) = &e.parent_id {
                            let derived: AugmentationParams<f64> =
                                params_for(manifest.global_seed, parent, k);
                            if derived != *p {
                                push(out, &e.sample_id, ViolationKind::ParamsNotDerived);
                            }
                        }
                    }
                }
            }
        }
    }
    for (id, n) in copies {
        if n != manifest.copies_per_sample as usize {
            push(
                out,
                id,
                ViolationKind::CopyCount {
                    expected: manifest.copies_per_sample as usize,
                    actual: n,
                },
            );
        }
    }
}

fn check_file(root: &Path, e: &ManifestEntry) -> Option<Violation> {
    let path = root.join(&e.image_path);
    let kind = match fs::read(&path) {
        Err(_) => ViolationKind::MissingFile(e.image_path.display().to_string()),
        Ok(bytes) => {
            let actual = content_digest(&bytes);
            if actual == e.content_digest {
                return None;
            }
            ViolationKind::DigestMismatch {
                recorded: e.content_digest.clone(),
                actual,
            }
        }
    };
    Some(Violation {
        sample_id: e.sample_id.clone(),
        kind,
    })
}

fn replay(manifest: &Manifest, root: &Path, e: &ManifestEntry) -> Option<Violation> {
    let fail = |kind| {
        Some(Violation {
            sample_id: e.sample_id.clone(),
            kind,
        })
    };
    let (Some(parent_id), Origin::Augmented(k)) = (&e.parent_id, e.origin) else {
        return None;
    };
    let parent = manifest.get(parent_id)?;
    let img = match Image::read_png(&root.join(&parent.image_path)) {
        Ok(img) => img,
        Err(err) => return fail(ViolationKind::Unreadable(format!("parent image: {err}"))),
    };
    let params: AugmentationParams<f64> = params_for(manifest.global_seed, parent_id, k);
    let digest = apply_chain_with(&img, &params, &manifest.chain)
        .and_then(|out| out.encode_png())
        .map(|png| content_digest(&png));
    match digest {
        Ok(d) if d == e.content_digest => None,
        Ok(_) => fail(ViolationKind::ReplayMismatch),
        Err(err) => fail(ViolationKind::Unreadable(err.to_string())),
    }
}

/// Check counts, parent links, labels, parameter ranges and derivation,
/// file digests, and optionally regenerate augmented images. Problems are
/// reported, never raised.
pub fn verify_manifest(manifest: &Manifest, root: &Path, rederive: Rederive) -> VerifyReport {
    let mut violations = Vec::new();
    structural(manifest, &mut violations);
    violations.extend(
        manifest
            .entries
            .par_iter()
            .filter_map(|e| check_file(root, e))
            .collect::<Vec<_>>(),
    );
    let augmented: Vec<&ManifestEntry> = manifest.augmented_entries().collect();
    let targets: Vec<&ManifestEntry> = match rederive {
        Rederive::None => vec![],
        Rederive::All => augmented,
        Rederive::One { pick_seed } if !augmented.is_empty() => {
            let i = RngState::from_seed(pick_seed).below(augmented.len());
            vec![augmented[i]]
        }
        Rederive::One { .. } => vec![],
    };
    violations.extend(
        targets
            .par_iter()
            .filter_map(|e| replay(manifest, root, e))
            .collect::<Vec<_>>(),
    );
    VerifyReport {
        checked_entries: manifest.entries.len(),
        replayed: targets.len(),
        violations,
    }
}
