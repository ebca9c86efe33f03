//! Skeleton sequence ingestion: per-sequence text files, split index files,
//! and a normalized JSON interchange format.

mod index;
mod ingest;
mod normalized;
mod skeleton_text;

pub use index::{
    parse_split_index, parse_split_index_str, DatasetIndex, DatasetProfile, IndexEntry,
    LabelScheme, LabelSource,
};
pub use ingest::{
    ingest_dataset, ingest_normalized, IngestFailure, IngestReport, NormalizedIndex, INDEX_FILE,
    INDEX_FORMAT, INDEX_VERSION,
};
pub use normalized::{
    export_normalized, import_normalized, NormalizedSequence, NORMALIZED_FORMAT, NORMALIZED_VERSION,
};
pub use skeleton_text::{parse_skeleton_str, parse_skeleton_text, write_skeleton_text};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Joints per frame in SHREC'17 and DHG-14/28 hand skeletons.
pub const HAND_JOINTS: usize = 22;
/// Joints per frame in JHMDB body skeletons.
pub const JHMDB_JOINTS: usize = 15;

pub type Joint<S> = [S; 3];

/// Ordered frames of 3D joints (world coordinates, metres).
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonSequence<S = f64> {
    joint_count: usize,
    frames: Vec<Vec<Joint<S>>>,
    pub frame_rate: Option<f64>,
}

impl<S: Scalar> SkeletonSequence<S> {
    pub fn new(joint_count: usize, frames: Vec<Vec<Joint<S>>>) -> Result<Self> {
        if joint_count == 0 {
            return Err(Error::InvalidParameter(
                "joint count must be positive".into(),
            ));
        }
        if let Some((t, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.len() != joint_count)
        {
            return Err(Error::InvalidParameter(format!(
                "frame {t} has {} joints, expected {joint_count}",
                f.len()
            )));
        }
        Ok(SkeletonSequence {
            joint_count,
            frames,
            frame_rate: None,
        })
    }

    pub fn joint_count(&self) -> usize {
        self.joint_count
    }

    pub fn frames(&self) -> &[Vec<Joint<S>>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Apply `f` to every joint.
    pub fn map_joints<T: Scalar>(&self, f: impl Fn(Joint<S>) -> Joint<T>) -> SkeletonSequence<T> {
        SkeletonSequence {
            joint_count: self.joint_count,
            frames: self
                .frames
                .iter()
                .map(|fr| fr.iter().map(|&j| f(j)).collect())
                .collect(),
            frame_rate: self.frame_rate,
        }
    }

    pub fn cast<T: Scalar>(&self) -> SkeletonSequence<T> {
        self.map_joints(|j| j.map(|v| T::lit(v.to_f64_lossy())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_frames() {
        let err = SkeletonSequence::<f64>::new(2, vec![vec![[0.0; 3]; 2], vec![[0.0; 3]; 1]]);
        assert!(err.is_err());
        assert!(SkeletonSequence::<f64>::new(0, vec![]).is_err());
        let ok = SkeletonSequence::<f64>::new(2, vec![vec![[1.0, 2.0, 3.0]; 2]]).unwrap();
        assert_eq!(ok.cast::<f32>().frames()[0][1], [1.0f32, 2.0, 3.0]);
    }
}
