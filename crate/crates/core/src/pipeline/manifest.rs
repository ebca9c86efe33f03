//! Dataset manifest: JSON Lines, UTF-8, `\n` line endings.
//!
//! Line 1 is the header:
//!
//! ```text
//! {"format":"gestaug-manifest","version":1,"global_seed":42,"copies_per_sample":3,
//!  "chain":{"toggles":{...},"fill":0,"pivot":"mid-gray","crop_resize":true}}
//! ```
//!
//! Every further line is one entry, fields in this order:
//! `sample_id`, `origin` (`"original"` or `"augmented:<k>"`), `parent_id`,
//! `label`, `split`, `image_path` (relative to the manifest's directory),
//! `params` (augmented entries only), `content_digest` (hex SHA-256 of the file).
//!
//! Entries are sorted by (parent id, copy index), so the serialized form does
//! not depend on processing order.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::HardLabel;
use crate::sample::{id_rel_path, Origin};
use crate::transforms::{AugmentationParams, ChainConfig};

pub const MANIFEST_FORMAT: &str = "gestaug-manifest";
pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub version: u32,
    pub global_seed: u64,
    pub copies_per_sample: u32,
    pub chain: ChainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub sample_id: String,
    pub origin: Origin,
    pub parent_id: Option<String>,
    pub label: HardLabel,
    #[serde(default)]
    pub split: Option<String>,
    pub image_path: PathBuf,
    pub params: Option<AugmentationParams<f64>>,
    pub content_digest: String,
}

impl ManifestEntry {
    /// Id of the original this entry belongs to (itself for originals).
    pub fn group_id(&self) -> &str {
        self.parent_id.as_deref().unwrap_or(&self.sample_id)
    }

    fn sort_key(&self) -> (&str, u32, &str) {
        (self.group_id(), self.origin.copy_index(), &self.sample_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub global_seed: u64,
    pub copies_per_sample: u32,
    pub chain: ChainConfig,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Manifest of originals only (copies = 0), as produced by rendering.
    pub fn originals(entries: Vec<ManifestEntry>) -> Self {
        let mut m = Manifest {
            global_seed: 0,
            copies_per_sample: 0,
            chain: ChainConfig::default(),
            entries,
        };
        m.sort();
        m
    }

    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    pub fn header(&self) -> ManifestHeader {
        ManifestHeader {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            global_seed: self.global_seed,
            copies_per_sample: self.copies_per_sample,
            chain: self.chain,
        }
    }

    pub fn original_entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.origin == Origin::Original)
    }

    pub fn augmented_entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.origin.is_augmented())
    }

    pub fn get(&self, sample_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.sample_id == sample_id)
    }

    pub fn by_id(&self) -> BTreeMap<&str, &ManifestEntry> {
        self.entries
            .iter()
            .map(|e| (e.sample_id.as_str(), e))
            .collect()
    }

    /// Canonical serialization (entries sorted).
    pub fn to_jsonl(&self) -> Result<String> {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = serde_json::to_string(&self.header())?;
        out.push('\n');
        for e in &sorted.entries {
            out.push_str(&serde_json::to_string(e)?);
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
            .ok_or_else(|| Error::format(source, "empty manifest (missing header)"))?;
        let header: ManifestHeader = serde_json::from_str(first)
            .map_err(|e| Error::parse(source, 1, format!("bad header: {e}")))?;
        if header.format != MANIFEST_FORMAT {
            return Err(Error::parse(
                source,
                1,
                format!("unknown format {:?}", header.format),
            ));
        }
        if header.version != MANIFEST_VERSION {
            return Err(Error::parse(
                source,
                1,
                format!("manifest version {} not supported", header.version),
            ));
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            let entry: ManifestEntry = serde_json::from_str(line)
                .map_err(|e| Error::parse(source, i + 1, e.to_string()))?;
            entries.push(entry);
        }
        Ok(Manifest {
            global_seed: header.global_seed,
            copies_per_sample: header.copies_per_sample,
            chain: header.chain,
            entries,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Manifest::from_jsonl(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_jsonl()?).map_err(|e| Error::io(path, e))
    }

    /// First duplicated sample id, if any.
    pub fn duplicate_id(&self) -> Option<&str> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .map(|e| e.sample_id.as_str())
            .find(|id| !seen.insert(*id))
    }
}

/// `images/<sample_id><suffix>.png`, rejecting ids that would escape the tree.
pub fn image_rel_path(sample_id: &str, suffix: &str) -> Result<PathBuf> {
    id_rel_path("images", sample_id, &format!("{suffix}.png"))
}

/// Id of the k-th augmented copy of `parent`.
pub fn augmented_id(parent: &str, copy_index: u32) -> String {
    format!("{parent}__aug{copy_index}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, origin: Origin) -> ManifestEntry {
        ManifestEntry {
            sample_id: match origin {
                Origin::Original => id.to_string(),
                Origin::Augmented(k) => augmented_id(id, k),
            },
            origin,
            parent_id: origin.is_augmented().then(|| id.to_string()),
            label: HardLabel::new(1, 14).unwrap(),
            split: None,
            image_path: "images/x.png".into(),
            params: origin.is_augmented().then(AugmentationParams::identity),
            content_digest: "00".into(),
        }
    }

    #[test]
    fn serialization_is_canonical() {
        let a = Manifest {
            global_seed: 9,
            copies_per_sample: 2,
            chain: ChainConfig::default(),
            entries: vec![
                entry("b", Origin::Augmented(2)),
                entry("a", Origin::Original),
                entry("b", Origin::Original),
                entry("a", Origin::Augmented(1)),
            ],
        };
        let mut b = a.clone();
        b.entries.reverse();
        let text = a.to_jsonl().unwrap();
        assert_eq!(text, b.to_jsonl().unwrap());
        let back = Manifest::from_jsonl(&text, Path::new("m")).unwrap();
        let ids: Vec<_> = back.entries.iter().map(|e| e.sample_id.as_str()).collect();
        assert_eq!(ids, ["a", "a__aug1", "b", "b__aug2"]);
        assert_eq!(back.to_jsonl().unwrap(), text);
        assert!(text
            .lines()
            .next()
            .unwrap()
            .starts_with("{\"format\":\"gestaug-manifest\""));
    }

    #[test]
    fn rejects_missing_header_and_bad_lines() {
        assert!(Manifest::from_jsonl("", Path::new("m")).is_err());
        let m = Manifest::originals(vec![entry("a", Origin::Original)]);
        let text = m.to_jsonl().unwrap() + "{not json}\n";
        match Manifest::from_jsonl(&text, Path::new("m")).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        let text = m
            .to_jsonl()
            .unwrap()
            .replace("\"version\":1", "\"version\":7");
        assert!(Manifest::from_jsonl(&text, Path::new("m")).is_err());
    }

    #[test]
    fn image_paths_stay_inside_tree() {
        assert_eq!(
            image_rel_path("shrec17/g1/f1/s1/t1", "__orig").unwrap(),
            PathBuf::from("images/shrec17/g1/f1/s1/t1__orig.png")
        );
        assert!(image_rel_path("../evil", "").is_err());
        assert!(image_rel_path("/abs", "").is_err());
        assert!(image_rel_path("", "").is_err());
    }

    #[test]
    fn finds_duplicates() {
        let m = Manifest::originals(vec![
            entry("a", Origin::Original),
            entry("a", Origin::Original),
        ]);
        assert_eq!(m.duplicate_id(), Some("a"));
    }
}
