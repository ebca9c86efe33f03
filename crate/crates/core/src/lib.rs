//! Deterministic augmentation of skeleton-gesture image datasets.
//!
//! Skeleton sequences are rendered into static spatiotemporal images
//! ([`render`]), each image is expanded into the original plus three
//! augmented copies by a fixed transform chain ([`transforms`]) with
//! per-copy seeded parameters ([`sampler`]), and the result is written with a
//! manifest that can be verified and replayed ([`pipeline`]). MixUp and
//! CutMix ([`baselines`]) are provided for comparison.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common `f64` instantiation used by the dataset pipeline.

pub mod baselines;
pub mod datasets;
pub mod digest;
pub mod error;
pub mod image;
pub mod label;
mod output;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod sample;
pub mod sampler;
pub mod scalar;
pub mod transforms;

pub use error::{Error, ErrorClass, Result};
pub use image::{image_mean, Image};
pub use label::{hard_to_soft, HardLabel, SoftLabel};
pub use sample::{id_rel_path, GestureSample, Origin};
pub use scalar::Scalar;

/// Transform parameters in double precision (what manifests record).
pub type Params = transforms::AugmentationParams<f64>;
/// Transform parameters in single precision.
pub type ParamsF32 = transforms::AugmentationParams<f32>;
pub type Sequence = datasets::SkeletonSequence<f64>;
pub type SequenceF32 = datasets::SkeletonSequence<f32>;
pub type View = render::Viewpoint<f64>;
pub type Mixed = baselines::MixedSample<f64>;
