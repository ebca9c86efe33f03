//! Whole-dataset MixUp / CutMix: one mixed image per original, partnered with
//! a seeded random other sample. Output manifest (JSON Lines) has a header
//! line followed by one [`MixedEntry`] per line, sorted by sample id.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cutmix, mixup, MixedSample};
use crate::digest::content_digest;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::label::SoftLabel;
use crate::output::build_output_dir;
use crate::pipeline::{image_rel_path, worker_pool, Manifest, ManifestEntry};
use crate::sample::GestureSample;
use crate::sampler::{derive_rng, RngState};

pub const MIXED_FORMAT: &str = "gestaug-mixed";
pub const MIXED_VERSION: u32 = 1;
pub const MIXED_FILE: &str = "mixed.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixMethod {
    Mixup,
    Cutmix,
}

/// How MixUp draws its weight. CutMix always derives it from the patch area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaLaw {
    Fixed(f64),
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixConfig {
    pub method: MixMethod,
    pub seed: u64,
    pub lambda: LambdaLaw,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedEntry {
    pub sample_id: String,
    pub parents: (String, String),
    pub lambda: f64,
    pub soft_label: SoftLabel,
    pub image_path: PathBuf,
    pub content_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MixedHeader {
    format: String,
    version: u32,
    method: MixMethod,
    seed: u64,
    lambda: LambdaLaw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedManifest {
    pub method: MixMethod,
    pub seed: u64,
    pub lambda: LambdaLaw,
    pub entries: Vec<MixedEntry>,
}

impl MixedManifest {
    pub fn to_jsonl(&self) -> Result<String> {
        let header = MixedHeader {
            format: MIXED_FORMAT.into(),
            version: MIXED_VERSION,
            method: self.method,
            seed: self.seed,
            lambda: self.lambda,
        };
        let mut out = serde_json::to_string(&header)? + "\n";
        for e in &self.entries {
            out += &serde_json::to_string(e)?;
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str, source: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::format(source, "missing header"))?;
        let h: MixedHeader =
            serde_json::from_str(first).map_err(|e| Error::parse(source, 1, e.to_string()))?;
        if h.format != MIXED_FORMAT || h.version != MIXED_VERSION {
            return Err(Error::parse(source, 1, "unsupported mixed manifest"));
        }
        let entries = lines
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::parse(source, i + 1, e.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(MixedManifest {
            method: h.method,
            seed: h.seed,
            lambda: h.lambda,
            entries,
        })
    }
}

fn load(root: &Path, e: &ManifestEntry) -> Result<GestureSample> {
    let img =
        Image::read_png(&root.join(&e.image_path)).map_err(|err| err.in_sample(&e.sample_id))?;
    Ok(GestureSample::original(img, e.label, e.sample_id.clone()))
}

fn mix_one(
    i: usize,
    originals: &[&ManifestEntry],
    root: &Path,
    out_dir: &Path,
    config: &MixConfig,
) -> Result<MixedEntry> {
    let a_entry = originals[i];
    let mut rng: RngState = derive_rng(config.seed, &format!("mix/{}", a_entry.sample_id), 0);
    let n = originals.len();
    let j = if n < 2 {
        i
    } else {
        let k = rng.below(n - 1);
        if k >= i {
            k + 1
        } else {
            k
        }
    };
    let a = load(root, a_entry)?;
    let b = load(root, originals[j])?;
    let mixed: MixedSample<f64> = match config.method {
        MixMethod::Mixup => {
            let lambda = match config.lambda {
                LambdaLaw::Fixed(l) => l,
                LambdaLaw::Uniform => rng.uniform(0.0, 1.0),
            };
            mixup(&a, &b, lambda)
        }
        MixMethod::Cutmix => cutmix(&a, &b, &mut rng),
    }
    .map_err(|e| e.in_sample(&a.sample_id))?;
    let sample_id = format!("{}__mix", a.sample_id);
    let rel = image_rel_path(&a.sample_id, "__mix")?;
    let dst = out_dir.join(&rel);
    if let Some(dir) = dst.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let png = mixed.image.write_png(&dst)?;
    Ok(MixedEntry {
        sample_id,
        parents: mixed.parents,
        lambda: mixed.lambda,
        soft_label: mixed.label,
        image_path: rel,
        content_digest: content_digest(&png),
    })
}

/// Mix every original of `input` with a seeded partner and write images plus
/// `out_dir/mixed.jsonl`.
pub fn mix_dataset(
    input: &Manifest,
    root: &Path,
    out_dir: &Path,
    config: &MixConfig,
) -> Result<MixedManifest> {
    if let LambdaLaw::Fixed(l) = config.lambda {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidParameter(format!(
                "lambda {l} outside [0, 1]"
            )));
        }
    }
    let originals: Vec<&ManifestEntry> = input.original_entries().collect();
    build_output_dir(out_dir, MIXED_FILE, |staging| {
        let pool = worker_pool(config.workers)?;
        let mut entries: Vec<MixedEntry> = pool.install(|| {
            (0..originals.len())
                .into_par_iter()
                .map(|i| mix_one(i, &originals, root, staging, config))
                .collect::<Result<_>>()
        })?;
        entries.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
        let manifest = MixedManifest {
            method: config.method,
            seed: config.seed,
            lambda: config.lambda,
            entries,
        };
        let path = staging.join(MIXED_FILE);
        fs::write(&path, manifest.to_jsonl()?).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    })
}
