use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::label::HardLabel;

/// A label vocabulary: 14 or 28 gesture classes, or any other fixed size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelScheme {
    Gestures14,
    Gestures28,
    Classes(usize),
}

impl LabelScheme {
    pub fn num_classes(self) -> usize {
        match self {
            LabelScheme::Gestures14 => 14,
            LabelScheme::Gestures28 => 28,
            LabelScheme::Classes(n) => n,
        }
    }
}

impl fmt::Display for LabelScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelScheme::Gestures14 => f.write_str("14g"),
            LabelScheme::Gestures28 => f.write_str("28g"),
            LabelScheme::Classes(n) => write!(f, "{n}c"),
        }
    }
}

impl FromStr for LabelScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "14g" => Ok(LabelScheme::Gestures14),
            "28g" => Ok(LabelScheme::Gestures28),
            _ => s
                .strip_suffix('c')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|n| *n > 0)
                .map(LabelScheme::Classes)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown label scheme {s:?}"))),
        }
    }
}

impl Serialize for LabelScheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LabelScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Where a scheme's label comes from in an index row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LabelSource {
    /// A column holding the label directly.
    Column { column: usize },
    /// Gesture and finger-mode columns: `gesture * 2 + finger` after offset removal.
    GestureFinger { gesture: usize, finger: usize },
}

/// Column layout and conventions of one dataset's split index files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub joint_count: usize,
    /// Index files relative to the dataset root; the file stem names the split.
    pub index_files: Vec<String>,
    pub gesture_column: Option<usize>,
    pub finger_column: Option<usize>,
    pub subject_column: Option<usize>,
    pub trial_column: Option<usize>,
    pub labels: BTreeMap<LabelScheme, LabelSource>,
    /// Subtracted from every raw label value (1 for 1-based files).
    pub label_offset: i64,
    /// Path of a sequence relative to the dataset root, with `{gesture}`,
    /// `{finger}`, `{subject}`, `{trial}` placeholders.
    pub sequence_template: String,
}

impl DatasetProfile {
    /// SHREC'17 train/test lists: `gesture finger subject trial label14 label28 size`.
    pub fn shrec17() -> Self {
        DatasetProfile {
            name: "shrec17".into(),
            joint_count: super::HAND_JOINTS,
            index_files: vec!["train_gestures.txt".into(), "test_gestures.txt".into()],
            gesture_column: Some(0),
            finger_column: Some(1),
            subject_column: Some(2),
            trial_column: Some(3),
            labels: BTreeMap::from([
                (LabelScheme::Gestures14, LabelSource::Column { column: 4 }),
                (LabelScheme::Gestures28, LabelSource::Column { column: 5 }),
            ]),
            label_offset: 1,
            sequence_template:
                "gesture_{gesture}/finger_{finger}/subject_{subject}/essai_{trial}/skeletons_world.txt"
                    .into(),
        }
    }

    /// DHG-14/28 `informations_troncage_sequences.txt`: `gesture finger subject trial start end`.
    pub fn dhg() -> Self {
        DatasetProfile {
            name: "dhg".into(),
            joint_count: super::HAND_JOINTS,
            index_files: vec!["informations_troncage_sequences.txt".into()],
            gesture_column: Some(0),
            finger_column: Some(1),
            subject_column: Some(2),
            trial_column: Some(3),
            labels: BTreeMap::from([
                (LabelScheme::Gestures14, LabelSource::Column { column: 0 }),
                (
                    LabelScheme::Gestures28,
                    LabelSource::GestureFinger {
                        gesture: 0,
                        finger: 1,
                    },
                ),
            ]),
            label_offset: 1,
            sequence_template:
                "gesture_{gesture}/finger_{finger}/subject_{subject}/essai_{trial}/skeleton_world.txt"
                    .into(),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "shrec17" => Some(Self::shrec17()),
            "dhg" => Some(Self::dhg()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub sample_id: String,
    /// Relative to the dataset root.
    pub sequence_path: PathBuf,
    pub labels: BTreeMap<LabelScheme, HardLabel>,
    pub gesture: Option<u32>,
    pub finger: Option<u32>,
    pub subject: Option<u32>,
    pub trial: Option<u32>,
    pub split: Option<String>,
}

impl IndexEntry {
    pub fn label(&self, scheme: LabelScheme) -> Option<HardLabel> {
        self.labels.get(&scheme).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub scheme: LabelScheme,
    pub entries: Vec<IndexEntry>,
}

pub fn parse_split_index(
    path: &Path,
    profile: &DatasetProfile,
    scheme: LabelScheme,
) -> Result<DatasetIndex> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let split = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    parse_split_index_str(&text, profile, scheme, split, path)
}

/// Parse whitespace-separated integer rows per `profile`. Every label the
/// profile declares is validated against its scheme; `scheme` must be one of them.
pub fn parse_split_index_str(
    text: &str,
    profile: &DatasetProfile,
    scheme: LabelScheme,
    split: Option<String>,
    source: &Path,
) -> Result<DatasetIndex> {
    if !profile.labels.contains_key(&scheme) {
        return Err(Error::InvalidParameter(format!(
            "profile {} has no {scheme} labels",
            profile.name
        )));
    }
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<i64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(source, row, format!("not an integer: {t:?}")))
            })
            .collect::<Result<_>>()?;
        let col = |c: usize| {
            cols.get(c).copied().ok_or_else(|| {
                Error::parse(
                    source,
                    row,
                    format!("missing column {c} ({} present)", cols.len()),
                )
            })
        };
        let id_field = |c: Option<usize>| -> Result<Option<u32>> {
            c.map(|c| {
                col(c).and_then(|v| {
                    u32::try_from(v)
                        .map_err(|_| Error::parse(source, row, format!("negative id {v}")))
                })
            })
            .transpose()
        };
        let gesture = id_field(profile.gesture_column)?;
        let finger = id_field(profile.finger_column)?;
        let subject = id_field(profile.subject_column)?;
        let trial = id_field(profile.trial_column)?;

        let mut labels = BTreeMap::new();
        for (&s, src) in &profile.labels {
            let index = match *src {
                LabelSource::Column { column } => col(column)? - profile.label_offset,
                LabelSource::GestureFinger { gesture, finger } => {
                    (col(gesture)? - profile.label_offset) * 2
                        + (col(finger)? - profile.label_offset)
                }
            };
            let label = usize::try_from(index)
                .ok()
                .and_then(|i| HardLabel::new(i, s.num_classes()).ok())
                .ok_or_else(|| {
                    Error::parse(
                        source,
                        row,
                        format!(
                            "{s} label {index} outside 0..{} after offset {}",
                            s.num_classes(),
                            profile.label_offset
                        ),
                    )
                })?;
            labels.insert(s, label);
        }

        let fill = |t: &str| {
            t.replace("{gesture}", &opt(gesture))
                .replace("{finger}", &opt(finger))
                .replace("{subject}", &opt(subject))
                .replace("{trial}", &opt(trial))
        };
        let sample_id = format!(
            "{}/g{}/f{}/s{}/t{}",
            profile.name,
            opt(gesture),
            opt(finger),
            opt(subject),
            opt(trial)
        );
        entries.push(IndexEntry {
            sample_id,
            sequence_path: PathBuf::from(fill(&profile.sequence_template)),
            labels,
            gesture,
            finger,
            subject,
            trial,
            split: split.clone(),
        });
    }
    if entries.is_empty() {
        log::warn!("{}: index is empty", source.display());
    }
    Ok(DatasetIndex { scheme, entries })
}

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| "x".to_string(), |v| v.to_string())
}
