use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class index within a fixed-size label scheme (14, 21, 28 classes, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawHardLabel")]
pub struct HardLabel {
    class_index: usize,
    num_classes: usize,
}

#[derive(Deserialize)]
struct RawHardLabel {
    class_index: usize,
    num_classes: usize,
}

impl TryFrom<RawHardLabel> for HardLabel {
    type Error = Error;

    fn try_from(raw: RawHardLabel) -> Result<Self> {
        HardLabel::new(raw.class_index, raw.num_classes)
    }
}

impl HardLabel {
    pub fn new(class_index: usize, num_classes: usize) -> Result<Self> {
        if num_classes == 0 || class_index >= num_classes {
            return Err(Error::InvalidParameter(format!(
                "class index {class_index} out of range for {num_classes} classes"
            )));
        }
        Ok(HardLabel {
            class_index,
            num_classes,
        })
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

/// Probability vector over classes; entries in [0, 1] summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftLabel(Vec<f64>);

pub const SOFT_LABEL_TOLERANCE: f64 = 1e-9;

impl SoftLabel {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidParameter("empty soft label".into()));
        }
        if probabilities
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::InvalidParameter(
                "soft label entries must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SOFT_LABEL_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "soft label sums to {sum}, expected 1"
            )));
        }
        Ok(SoftLabel(probabilities))
    }

    /// Convex combination `w * onehot(a) + (1 - w) * onehot(b)`.
    pub fn mix(a: HardLabel, b: HardLabel, weight_a: f64) -> Result<Self> {
        if a.num_classes() != b.num_classes() {
            return Err(Error::DimensionMismatch(format!(
                "label schemes differ: {} vs {} classes",
                a.num_classes(),
                b.num_classes()
            )));
        }
        if !(0.0..=1.0).contains(&weight_a) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {weight_a} outside [0, 1]"
            )));
        }
        let mut p = vec![0.0; a.num_classes()];
        p[a.class_index()] += weight_a;
        p[b.class_index()] += 1.0 - weight_a;
        SoftLabel::new(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }
}

pub fn hard_to_soft(label: HardLabel) -> SoftLabel {
    let mut p = vec![0.0; label.num_classes()];
    p[label.class_index()] = 1.0;
    SoftLabel(p)
}
