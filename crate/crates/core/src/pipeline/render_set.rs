//! Ingested index → one rendered PNG per sequence plus an originals manifest.

use std::path::Path;

use rayon::prelude::*;

use super::augment::worker_pool;
use super::manifest::{image_rel_path, Manifest, ManifestEntry, MANIFEST_FILE};
use crate::datasets::{import_normalized, LabelScheme, NormalizedIndex, INDEX_FILE};
use crate::digest::content_digest;
use crate::error::{Error, Result};
use crate::output::{build_output_dir, ensure_parent};
use crate::render::{render_sequence, RenderSettings, Viewpoint};
use crate::sample::Origin;
use crate::transforms::ChainConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    pub view: Viewpoint<f64>,
    pub settings: RenderSettings,
    pub scheme: LabelScheme,
    pub workers: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            view: Viewpoint::FrontAway,
            settings: RenderSettings::default(),
            scheme: LabelScheme::Gestures14,
            workers: 0,
        }
    }
}

#[derive(Debug)]
pub struct RenderReport {
    pub manifest: Manifest,
    /// Sequences that could not be rendered, with the reason.
    pub failures: Vec<(String, Error)>,
}

/// Render every sequence of the index in `index_dir` into `out_dir/images`
/// and write `out_dir/manifest.jsonl` listing the successes as originals.
pub fn render_dataset(
    index_dir: &Path,
    config: &RenderConfig,
    out_dir: &Path,
) -> Result<RenderReport> {
    config.settings.validate()?;
    let index = NormalizedIndex::read(&index_dir.join(INDEX_FILE))?;
    build_output_dir(out_dir, MANIFEST_FILE, |staging| {
        let pool = worker_pool(config.workers)?;
        let results: Vec<std::result::Result<ManifestEntry, (String, Error)>> =
            pool.install(|| {
                index
                    .entries
                    .par_iter()
                    .map(|e| {
                        let id = e.sample_id.clone();
                        let label = e.label(config.scheme).ok_or_else(|| {
                            (
                                id.clone(),
                                Error::InvalidParameter(format!("no {} label", config.scheme)),
                            )
                        })?;
                        let rendered = (|| {
                            let doc = import_normalized(&index_dir.join(&e.sequence_path))?;
                            let image =
                                render_sequence(&doc.sequence, config.view, &config.settings)?;
                            let rel = image_rel_path(&id, "")?;
                            let dst = staging.join(&rel);
                            ensure_parent(&dst)?;
                            let png = image.write_png(&dst)?;
                            Ok::<_, Error>((rel, content_digest(&png)))
                        })();
                        let (image_path, content_digest) =
                            rendered.map_err(|err| (id.clone(), err))?;
                        Ok(ManifestEntry {
                            sample_id: id,
                            origin: Origin::Original,
                            parent_id: None,
                            label,
                            split: e.split.clone(),
                            image_path,
                            params: None,
                            content_digest,
                        })
                    })
                    .collect()
            });
        let mut entries = Vec::new();
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(e) => entries.push(e),
                Err(f) => failures.push(f),
            }
        }
        let mut manifest = Manifest {
            global_seed: 0,
            copies_per_sample: 0,
            chain: ChainConfig::default(),
            entries,
        };
        manifest.sort();
        manifest.write(&staging.join(MANIFEST_FILE))?;
        Ok(RenderReport { manifest, failures })
    })
}
