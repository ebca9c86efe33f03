use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::label::HardLabel;

/// Whether a sample is a dataset original or the k-th augmented copy of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Original,
    Augmented(u32),
}

impl Origin {
    /// 0 for originals, k for the k-th copy. Used for canonical ordering.
    pub fn copy_index(self) -> u32 {
        match self {
            Origin::Original => 0,
            Origin::Augmented(k) => k,
        }
    }

    pub fn is_augmented(self) -> bool {
        matches!(self, Origin::Augmented(_))
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Original => f.write_str("original"),
            Origin::Augmented(k) => write!(f, "augmented:{k}"),
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "original" {
            return Ok(Origin::Original);
        }
        s.strip_prefix("augmented:")
            .and_then(|k| k.parse::<u32>().ok())
            .filter(|k| *k >= 1)
            .map(Origin::Augmented)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown origin {s:?}")))
    }
}

impl Serialize for Origin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Origin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GestureSample {
    pub image: Image,
    pub label: HardLabel,
    /// Opaque id, conventionally `dataset/gesture/subject/trial`.
    pub sample_id: String,
    pub origin: Origin,
}

impl GestureSample {
    pub fn original(image: Image, label: HardLabel, sample_id: impl Into<String>) -> Self {
        GestureSample {
            image,
            label,
            sample_id: sample_id.into(),
            origin: Origin::Original,
        }
    }
}

/// `<dir>/<sample_id><tail>`. Sample ids may contain `/` but must stay a plain
/// relative path: no `..`, no root, no backslashes.
pub fn id_rel_path(dir: &str, sample_id: &str, tail: &str) -> Result<PathBuf> {
    let rel = Path::new(sample_id);
    let ok = !sample_id.is_empty()
        && !sample_id.contains('\\')
        && rel.components().all(|c| matches!(c, Component::Normal(_)));
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "sample id {sample_id:?} is not a safe relative path"
        )));
    }
    Ok(Path::new(dir).join(format!("{sample_id}{tail}")))
}
