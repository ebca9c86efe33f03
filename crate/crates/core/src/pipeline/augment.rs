use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::manifest::{augmented_id, image_rel_path, Manifest, ManifestEntry, MANIFEST_FILE};
use crate::digest::content_digest;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::output::{build_output_dir, ensure_parent};
use crate::sample::{GestureSample, Origin};
use crate::sampler::params_for;
use crate::transforms::{apply_chain_with, AugmentationParams, ChainConfig};

/// Augmented copies per original by default (4× dataset).
pub const DEFAULT_COPIES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentConfig {
    pub global_seed: u64,
    pub copies: u32,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    pub chain: ChainConfig,
    /// Hard-link originals into the output tree instead of copying them.
    pub link_originals: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            global_seed: 0,
            copies: DEFAULT_COPIES,
            workers: 0,
            chain: ChainConfig::default(),
            link_originals: false,
        }
    }
}

/// The original followed by its augmented copies, with the parameters used
/// for each copy.
pub fn augment_variants(
    sample: &GestureSample,
    global_seed: u64,
    copies: u32,
    chain: &ChainConfig,
) -> Result<Vec<(GestureSample, Option<AugmentationParams<f64>>)>> {
    let mut out = Vec::with_capacity(copies as usize + 1);
    out.push((sample.clone(), None));
    for k in 1..=copies {
        let params: AugmentationParams<f64> = params_for(global_seed, &sample.sample_id, k);
        let image = apply_chain_with(&sample.image, &params, chain)
            .map_err(|e| e.in_sample(sample.sample_id.clone()))?;
        out.push((
            GestureSample {
                image,
                label: sample.label,
                sample_id: augmented_id(&sample.sample_id, k),
                origin: Origin::Augmented(k),
            },
            Some(params),
        ));
    }
    Ok(out)
}

/// `[original, copy 1, ..., copy n]` using the default chain settings.
pub fn augment_sample(
    sample: &GestureSample,
    global_seed: u64,
    copies: u32,
) -> Result<Vec<GestureSample>> {
    Ok(
        augment_variants(sample, global_seed, copies, &ChainConfig::default())?
            .into_iter()
            .map(|(s, _)| s)
            .collect(),
    )
}

fn process_one(
    entry: &ManifestEntry,
    input_root: &Path,
    staging: &Path,
    config: &AugmentConfig,
) -> Result<Vec<ManifestEntry>> {
    let src = input_root.join(&entry.image_path);
    let bytes = fs::read(&src).map_err(|e| Error::io(&src, e))?;
    let image = Image::decode_png(&bytes)?;

    let orig_rel = image_rel_path(&entry.sample_id, "__orig")?;
    let orig_dst = staging.join(&orig_rel);
    ensure_parent(&orig_dst)?;
    let linked = config.link_originals && fs::hard_link(&src, &orig_dst).is_ok();
    if !linked {
        fs::write(&orig_dst, &bytes).map_err(|e| Error::io(&orig_dst, e))?;
    }
    let mut out = vec![ManifestEntry {
        sample_id: entry.sample_id.clone(),
        origin: Origin::Original,
        parent_id: None,
        label: entry.label,
        split: entry.split.clone(),
        image_path: orig_rel,
        params: None,
        content_digest: content_digest(&bytes),
    }];

    let sample = GestureSample::original(image, entry.label, entry.sample_id.clone());
    for (aug, params) in
        augment_variants(&sample, config.global_seed, config.copies, &config.chain)?
            .into_iter()
            .skip(1)
    {
        let rel = image_rel_path(
            &entry.sample_id,
            &format!("__aug{}", aug.origin.copy_index()),
        )?;
        let dst = staging.join(&rel);
        let png = aug.image.write_png(&dst)?;
        out.push(ManifestEntry {
            sample_id: aug.sample_id,
            origin: aug.origin,
            parent_id: Some(entry.sample_id.clone()),
            label: entry.label,
            split: entry.split.clone(),
            image_path: rel,
            params,
            content_digest: content_digest(&png),
        });
    }
    Ok(out)
}

pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

/// Expand every original in `input` into `1 + copies` images under `out_dir`
/// and write `out_dir/manifest.jsonl`.
///
/// Work happens in a hidden sibling directory that is renamed into place on
/// success and removed on failure. Output is identical for any worker count.
pub fn augment_dataset(
    input: &Manifest,
    input_root: &Path,
    out_dir: &Path,
    config: &AugmentConfig,
) -> Result<Manifest> {
    if let Some(e) = input.augmented_entries().next() {
        return Err(Error::InvalidParameter(format!(
            "input manifest already contains augmented entry {}",
            e.sample_id
        )));
    }
    if let Some(id) = input.duplicate_id() {
        return Err(Error::InvalidParameter(format!("duplicate sample id {id}")));
    }
    build_output_dir(out_dir, MANIFEST_FILE, |staging| {
        fs::create_dir_all(staging.join("images")).map_err(|e| Error::io(staging, e))?;
        let pool = worker_pool(config.workers)?;
        let groups: Vec<Vec<ManifestEntry>> = pool.install(|| {
            input
                .entries
                .par_iter()
                .map(|e| {
                    process_one(e, input_root, staging, config).map_err(|err| match err {
                        Error::Sample { .. } => err,
                        other => other.in_sample(e.sample_id.clone()),
                    })
                })
                .collect::<Result<_>>()
        })?;
        let mut manifest = Manifest {
            global_seed: config.global_seed,
            copies_per_sample: config.copies,
            chain: config.chain,
            entries: groups.into_iter().flatten().collect(),
        };
        manifest.sort();
        manifest.write(&staging.join(MANIFEST_FILE))?;
        Ok(manifest)
    })
}
