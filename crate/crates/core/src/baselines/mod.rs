//! MixUp and CutMix, the sample-mixing baselines. Unlike the transform chain
//! these change the label: the result carries a soft label.

mod dataset;

pub use dataset::{
    mix_dataset, LambdaLaw, MixConfig, MixMethod, MixedEntry, MixedManifest, MIXED_FILE,
    MIXED_FORMAT, MIXED_VERSION,
};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::label::SoftLabel;
use crate::sample::GestureSample;
use crate::sampler::RngState;
use crate::scalar::{quantize, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSample<S> {
    pub image: Image,
    pub label: SoftLabel,
    pub parents: (String, String),
    /// Weight of the first parent in the label.
    pub lambda: S,
}

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PatchBox {
    pub fn area(&self) -> usize {
        self.x1.saturating_sub(self.x0) * self.y1.saturating_sub(self.y0)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Clip to a `width × height` frame.
    pub fn clipped(&self, width: usize, height: usize) -> PatchBox {
        let x1 = self.x1.min(width);
        let y1 = self.y1.min(height);
        PatchBox {
            x0: self.x0.min(x1),
            y0: self.y0.min(y1),
            x1,
            y1,
        }
    }
}

fn check_pair(a: &GestureSample, b: &GestureSample) -> Result<()> {
    if !a.image.same_dims(&b.image) {
        return Err(Error::DimensionMismatch(format!(
            "{} is {:?}, {} is {:?}",
            a.sample_id,
            a.image.dims(),
            b.sample_id,
            b.image.dims()
        )));
    }
    Ok(())
}

/// Pixelwise `round(lambda * a + (1 - lambda) * b)`, label mixed with the same weight.
pub fn mixup<S: Scalar>(a: &GestureSample, b: &GestureSample, lambda: S) -> Result<MixedSample<S>> {
    check_pair(a, b)?;
    if !(lambda >= S::zero() && lambda <= S::one()) {
        return Err(Error::InvalidParameter(format!(
            "mixup lambda {lambda} outside [0, 1]"
        )));
    }
    let rest = S::one() - lambda;
    let data = a
        .image
        .data()
        .iter()
        .zip(b.image.data())
        .map(|(&pa, &pb)| quantize(lambda * S::lit(pa as f64) + rest * S::lit(pb as f64)))
        .collect();
    let (w, h, c) = a.image.dims();
    Ok(MixedSample {
        image: Image::new(w, h, c, data)?,
        label: SoftLabel::mix(a.label, b.label, lambda.to_f64_lossy())?,
        parents: (a.sample_id.clone(), b.sample_id.clone()),
        lambda,
    })
}

/// Draw a CutMix patch: `lambda0 ~ U[0, 1]`, side lengths `W·√(1-lambda0)` and
/// `H·√(1-lambda0)` (floored), centre uniform over pixels, clipped to the frame.
pub fn sample_patch(width: usize, height: usize, rng: &mut RngState) -> PatchBox {
    let lambda0 = rng.next_unit();
    let ratio = (1.0 - lambda0).sqrt();
    let cut_w = (width as f64 * ratio).floor() as usize;
    let cut_h = (height as f64 * ratio).floor() as usize;
    let cx = rng.below(width);
    let cy = rng.below(height);
    let clip = |start: isize, len: usize, limit: usize| {
        let lo = start.clamp(0, limit as isize) as usize;
        let hi = (start + len as isize).clamp(0, limit as isize) as usize;
        (lo, hi)
    };
    let (x0, x1) = clip(cx as isize - (cut_w / 2) as isize, cut_w, width);
    let (y0, y1) = clip(cy as isize - (cut_h / 2) as isize, cut_h, height);
    PatchBox { x0, y0, x1, y1 }
}

/// Paste `patch` of `b` into `a`. Lambda is recomputed from the clipped area.
pub fn cutmix_with_patch<S: Scalar>(
    a: &GestureSample,
    b: &GestureSample,
    patch: PatchBox,
) -> Result<MixedSample<S>> {
    check_pair(a, b)?;
    let (w, h, c) = a.image.dims();
    let patch = patch.clipped(w, h);
    let mut data = a.image.data().to_vec();
    for y in patch.y0..patch.y1 {
        let start = (y * w + patch.x0) * c;
        let end = (y * w + patch.x1) * c;
        data[start..end].copy_from_slice(&b.image.data()[start..end]);
    }
    let lambda = 1.0 - patch.area() as f64 / (w * h) as f64;
    Ok(MixedSample {
        image: Image::new(w, h, c, data)?,
        label: SoftLabel::mix(a.label, b.label, lambda)?,
        parents: (a.sample_id.clone(), b.sample_id.clone()),
        lambda: S::lit(lambda),
    })
}

pub fn cutmix<S: Scalar>(
    a: &GestureSample,
    b: &GestureSample,
    rng: &mut RngState,
) -> Result<MixedSample<S>> {
    check_pair(a, b)?;
    let patch = sample_patch(a.image.width(), a.image.height(), rng);
    cutmix_with_patch(a, b, patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::HardLabel;

    fn sample(id: &str, class: usize, classes: usize, img: Image) -> GestureSample {
        GestureSample::original(img, HardLabel::new(class, classes).unwrap(), id)
    }

    fn pair(w: usize, h: usize) -> (GestureSample, GestureSample) {
        let a = Image::from_fn(w, h, 3, |x, y, c| ((x + y + c) % 100) as u8).unwrap();
        let b = Image::from_fn(w, h, 3, |x, y, c| (150 + (x * y + c) % 100) as u8).unwrap();
        (sample("a", 0, 2, a), sample("b", 1, 2, b))
    }

    #[test]
    fn mixup_endpoints() {
        let (a, b) = pair(8, 6);
        let m = mixup(&a, &b, 1.0).unwrap();
        assert_eq!(m.image, a.image);
        assert_eq!(m.label.probabilities(), &[1.0, 0.0]);
        let m = mixup(&a, &b, 0.0f32).unwrap();
        assert_eq!(m.image, b.image);
        assert_eq!(m.label.probabilities(), &[0.0, 1.0]);
    }

    #[test]
    fn mixup_midpoint() {
        let a = sample("a", 0, 2, Image::filled(2, 2, 1, 100).unwrap());
        let b = sample("b", 1, 2, Image::filled(2, 2, 1, 200).unwrap());
        let m = mixup(&a, &b, 0.5).unwrap();
        assert!(m.image.data().iter().all(|&v| v == 150));
        assert_eq!(m.label.probabilities(), &[0.5, 0.5]);
        assert_eq!(m.parents, ("a".to_string(), "b".to_string()));
    }

    #[test]
    fn mixup_rejects_mismatch_and_bad_lambda() {
        let (a, _) = pair(8, 6);
        let (b, _) = pair(6, 8);
        assert!(matches!(
            mixup(&a, &b, 0.5),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(mixup(&a, &a, 1.5).is_err());
        assert!(cutmix::<f64>(&a, &b, &mut RngState::from_seed(1)).is_err());
    }

    #[test]
    fn mixup_symmetry() {
        let (a, b) = pair(9, 7);
        for l in [0.0, 0.5, 1.0] {
            assert_eq!(
                mixup(&a, &b, l).unwrap().image,
                mixup(&b, &a, 1.0 - l).unwrap().image
            );
        }
        for l in [0.1, 0.33, 0.9] {
            let ab = mixup(&a, &b, l).unwrap().label;
            let ba = mixup(&b, &a, 1.0 - l).unwrap().label;
            for (x, y) in ab.probabilities().iter().zip(ba.probabilities()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cutmix_degenerate_patches() {
        let (a, b) = pair(10, 10);
        let empty = PatchBox {
            x0: 3,
            y0: 3,
            x1: 3,
            y1: 8,
        };
        let m: MixedSample<f64> = cutmix_with_patch(&a, &b, empty).unwrap();
        assert_eq!(m.image, a.image);
        assert_eq!(m.lambda, 1.0);
        let full = PatchBox {
            x0: 0,
            y0: 0,
            x1: 50,
            y1: 50,
        };
        let m: MixedSample<f64> = cutmix_with_patch(&a, &b, full).unwrap();
        assert_eq!(m.image, b.image);
        assert_eq!(m.lambda, 0.0);
        assert_eq!(m.label.probabilities(), &[0.0, 1.0]);
    }

    #[test]
    fn cutmix_five_by_four_patch() {
        let (a, b) = pair(10, 10);
        let patch = PatchBox {
            x0: 2,
            y0: 3,
            x1: 7,
            y1: 7,
        };
        let m: MixedSample<f64> = cutmix_with_patch(&a, &b, patch).unwrap();
        assert!((m.lambda - 0.8).abs() < 1e-15);
        for y in 0..10 {
            for x in 0..10 {
                let inside = (2..7).contains(&x) && (3..7).contains(&y);
                let src = if inside { &b.image } else { &a.image };
                assert_eq!(m.image.pixel(x, y), src.pixel(x, y));
            }
        }
        assert!((m.label.probabilities()[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sampled_patches_stay_in_frame_and_lambda_matches_area() {
        let (a, b) = pair(13, 9);
        let mut rng = RngState::from_seed(5);
        for _ in 0..500 {
            let m: MixedSample<f64> = cutmix(&a, &b, &mut rng).unwrap();
            let changed = (0..9)
                .flat_map(|y| (0..13).map(move |x| (x, y)))
                .filter(|&(x, y)| m.image.pixel(x, y) != a.image.pixel(x, y))
                .count();
            assert_eq!(m.lambda, 1.0 - changed as f64 / 117.0);
            let sum: f64 = m.label.probabilities().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}
