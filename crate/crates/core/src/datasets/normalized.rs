//! Normalized interchange: one JSON document per sequence.
//!
//! ```text
//! {
//!   "format": "gestaug-skeleton",
//!   "version": 1,
//!   "sample_id": "shrec17/g1/f1/s1/t1",
//!   "joint_count": 22,
//!   "frame_rate": null,
//!   "labels": {"14g": {"class_index": 0, "num_classes": 14}, ...},
//!   "subject": 1,
//!   "trial": 1,
//!   "split": "train_gestures",
//!   "frames": [[x0, y0, z0, x1, y1, z1, ...], ...]
//! }
//! ```
//!
//! Each frame holds exactly `joint_count * 3` numbers. Floats are written in
//! shortest round-trip form, so export followed by import is lossless.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LabelScheme, SkeletonSequence};
use crate::error::{Error, Result};
use crate::label::HardLabel;

pub const NORMALIZED_FORMAT: &str = "gestaug-skeleton";
pub const NORMALIZED_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSequence {
    pub sample_id: String,
    pub labels: BTreeMap<LabelScheme, HardLabel>,
    pub subject: Option<u32>,
    pub trial: Option<u32>,
    pub split: Option<String>,
    pub sequence: SkeletonSequence<f64>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    version: u32,
    sample_id: String,
    joint_count: usize,
    frame_rate: Option<f64>,
    labels: BTreeMap<LabelScheme, HardLabel>,
    #[serde(default)]
    subject: Option<u32>,
    #[serde(default)]
    trial: Option<u32>,
    #[serde(default)]
    split: Option<String>,
    frames: Vec<Vec<f64>>,
}

impl NormalizedSequence {
    pub fn to_json(&self) -> Result<String> {
        let doc = Document {
            format: NORMALIZED_FORMAT.into(),
            version: NORMALIZED_VERSION,
            sample_id: self.sample_id.clone(),
            joint_count: self.sequence.joint_count(),
            frame_rate: self.sequence.frame_rate,
            labels: self.labels.clone(),
            subject: self.subject,
            trial: self.trial,
            split: self.split.clone(),
            frames: self
                .sequence
                .frames()
                .iter()
                .map(|f| f.iter().flatten().copied().collect())
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str, source: &Path) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| Error::format(source, format!("malformed document: {e}")))?;
        if doc.format != NORMALIZED_FORMAT {
            return Err(Error::format(
                source,
                format!("unknown format {:?}", doc.format),
            ));
        }
        if doc.version != NORMALIZED_VERSION {
            return Err(Error::format(
                source,
                format!(
                    "schema version {} not supported (expected {NORMALIZED_VERSION})",
                    doc.version
                ),
            ));
        }
        let expected = doc.joint_count * 3;
        let mut frames = Vec::with_capacity(doc.frames.len());
        for (t, flat) in doc.frames.iter().enumerate() {
            if flat.len() != expected {
                return Err(Error::format(
                    source,
                    format!(
                        "frame {t} has {} coordinates, expected {expected}",
                        flat.len()
                    ),
                ));
            }
            if flat.iter().any(|v| !v.is_finite()) {
                return Err(Error::format(
                    source,
                    format!("frame {t} has a non-finite value"),
                ));
            }
            frames.push(flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect());
        }
        let mut sequence = SkeletonSequence::new(doc.joint_count, frames)
            .map_err(|e| Error::format(source, e.to_string()))?;
        sequence.frame_rate = doc.frame_rate;
        Ok(NormalizedSequence {
            sample_id: doc.sample_id,
            labels: doc.labels,
            subject: doc.subject,
            trial: doc.trial,
            split: doc.split,
            sequence,
        })
    }
}

pub fn export_normalized(path: &Path, seq: &NormalizedSequence) -> Result<()> {
    fs::write(path, seq.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn import_normalized(path: &Path) -> Result<NormalizedSequence> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NormalizedSequence::from_json(&text, path)
}
