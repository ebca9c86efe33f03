use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two crop sizes, as fractions of width and height.
pub const CROP_SCALES: [f64; 2] = [0.90, 0.95];
pub const THETA_RANGE: (f64, f64) = (-15.0, 15.0);
pub const ZETA_RANGE: (f64, f64) = (0.90, 1.10);
pub const BETA_RANGE: (f64, f64) = (0.8, 1.2);
pub const GAMMA_RANGE: (f64, f64) = (0.8, 1.2);
pub const OFFSET_RANGE: (f64, f64) = (0.0, 1.0);

/// One concrete draw of the transform chain's parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationParams<S> {
    pub crop_scale: S,
    /// Fraction of the horizontal slack `W - floor(s*W)` to the left of the window.
    pub crop_offset_x: S,
    pub crop_offset_y: S,
    /// Counter-clockwise rotation in degrees.
    pub theta_deg: S,
    pub zeta: S,
    pub beta: S,
    pub gamma: S,
}

/// A parameter that fails its range check.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeViolation {
    pub field: &'static str,
    pub value: f64,
}

impl<S: Scalar> AugmentationParams<S> {
    /// Parameters under which every transform is the identity.
    pub fn identity() -> Self {
        AugmentationParams {
            crop_scale: S::one(),
            crop_offset_x: S::zero(),
            crop_offset_y: S::zero(),
            theta_deg: S::zero(),
            zeta: S::one(),
            beta: S::one(),
            gamma: S::one(),
        }
    }

    /// Every field that lies outside its permitted set or closed range.
    pub fn range_violations(&self) -> Vec<RangeViolation> {
        let mut out = Vec::new();
        let mut check = |field, v: S, (lo, hi): (f64, f64)| {
            if !(v >= S::lit(lo) && v <= S::lit(hi)) {
                out.push(RangeViolation {
                    field,
                    value: v.to_f64_lossy(),
                });
            }
        };
        check("crop_offset_x", self.crop_offset_x, OFFSET_RANGE);
        check("crop_offset_y", self.crop_offset_y, OFFSET_RANGE);
        check("theta_deg", self.theta_deg, THETA_RANGE);
        check("zeta", self.zeta, ZETA_RANGE);
        check("beta", self.beta, BETA_RANGE);
        check("gamma", self.gamma, GAMMA_RANGE);
        if !CROP_SCALES.iter().any(|&s| S::lit(s) == self.crop_scale) {
            out.insert(
                0,
                RangeViolation {
                    field: "crop_scale",
                    value: self.crop_scale.to_f64_lossy(),
                },
            );
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.range_violations().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidParameter(format!(
                "{} = {} is out of range",
                v.field, v.value
            ))),
        }
    }

    pub fn cast<T: Scalar>(&self) -> AugmentationParams<T> {
        let c = |v: S| T::lit(v.to_f64_lossy());
        AugmentationParams {
            crop_scale: c(self.crop_scale),
            crop_offset_x: c(self.crop_offset_x),
            crop_offset_y: c(self.crop_offset_y),
            theta_deg: c(self.theta_deg),
            zeta: c(self.zeta),
            beta: c(self.beta),
            gamma: c(self.gamma),
        }
    }
}
