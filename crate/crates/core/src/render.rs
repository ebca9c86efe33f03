//! Skeleton sequence → static spatiotemporal image.
//!
//! All frames are projected onto one plane, normalized together into the
//! canvas, and drawn oldest first with a colour whose luminance rises with
//! time, so the most recent pose sits on top and motion order stays readable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datasets::{Joint, SkeletonSequence, HAND_JOINTS};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::{sin_cos_deg, Scalar};

/// Orthographic viewing direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Viewpoint<S = f64> {
    /// Plane (x, z).
    TopDown,
    /// Plane (x, y).
    FrontAway,
    /// Plane (z, y).
    SideLeft,
    /// Rotate about the vertical axis by `azimuth`, then about the horizontal
    /// axis by `elevation`, then drop depth.
    Custom { azimuth_deg: S, elevation_deg: S },
}

impl<S: Scalar> fmt::Display for Viewpoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Viewpoint::TopDown => f.write_str("top-down"),
            Viewpoint::FrontAway => f.write_str("front-away"),
            Viewpoint::SideLeft => f.write_str("side-left"),
            Viewpoint::Custom {
                azimuth_deg,
                elevation_deg,
            } => write!(f, "custom:{azimuth_deg},{elevation_deg}"),
        }
    }
}

impl<S: Scalar> FromStr for Viewpoint<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown viewpoint {s:?}"));
        match s {
            "top-down" => Ok(Viewpoint::TopDown),
            "front-away" => Ok(Viewpoint::FrontAway),
            "side-left" => Ok(Viewpoint::SideLeft),
            _ => {
                let rest = s.strip_prefix("custom:").ok_or_else(bad)?;
                let (a, e) = rest.split_once(',').ok_or_else(bad)?;
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                let e: f64 = e.trim().parse().map_err(|_| bad())?;
                if !a.is_finite() || !e.is_finite() {
                    return Err(bad());
                }
                Ok(Viewpoint::Custom {
                    azimuth_deg: S::lit(a),
                    elevation_deg: S::lit(e),
                })
            }
        }
    }
}

/// Project a joint onto the view plane.
pub fn project<S: Scalar>(joint: Joint<S>, view: Viewpoint<S>) -> (S, S) {
    let [x, y, z] = joint;
    match view {
        Viewpoint::TopDown => (x, z),
        Viewpoint::FrontAway => (x, y),
        Viewpoint::SideLeft => (z, y),
        Viewpoint::Custom {
            azimuth_deg,
            elevation_deg,
        } => {
            let (sa, ca) = sin_cos_deg(azimuth_deg);
            let (se, ce) = sin_cos_deg(elevation_deg);
            let x1 = ca * x + sa * z;
            let z1 = ca * z - sa * x;
            let y2 = ce * y - se * z1;
            (x1, y2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSettings {
    pub width: usize,
    pub height: usize,
    pub joint_radius: f64,
    pub draw_bones: bool,
    /// Fraction of each dimension kept empty on every side, in [0, 0.4).
    pub margin: f64,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            width: 227,
            height: 227,
            joint_radius: 2.0,
            draw_bones: true,
            margin: 0.1,
        }
    }
}

impl RenderSettings {
    pub fn validate(&self) -> Result<()> {
        if self.width < 32 || self.height < 32 {
            return Err(Error::InvalidParameter(format!(
                "canvas {}x{} is smaller than 32x32",
                self.width, self.height
            )));
        }
        if !(0.0..0.4).contains(&self.margin) {
            return Err(Error::InvalidParameter(format!(
                "margin {} outside [0, 0.4)",
                self.margin
            )));
        }
        if !(self.joint_radius >= 0.0 && self.joint_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "joint radius {} must be non-negative",
                self.joint_radius
            )));
        }
        Ok(())
    }

    /// Inclusive pixel bounds `(x0, y0, x1, y1)` of the margin-inset rectangle.
    pub fn inset_rect(&self) -> (usize, usize, usize, usize) {
        let mx = (self.margin * self.width as f64).ceil() as usize;
        let my = (self.margin * self.height as f64).ceil() as usize;
        (mx, my, self.width - 1 - mx, self.height - 1 - my)
    }
}

/// Time-to-colour map, `t` in [0, 1]. Luminance strictly increases with `t`.
pub fn color_ramp(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    [
        (64.0 + 191.0 * t).round() as u8,
        (16.0 + 239.0 * t).round() as u8,
        (160.0 - 96.0 * t).round() as u8,
    ]
}

/// Rec. 709 relative luminance of an 8-bit RGB triple.
pub fn luminance(rgb: &[u8]) -> f64 {
    0.2126 * rgb[0] as f64 + 0.7152 * rgb[1] as f64 + 0.0722 * rgb[2] as f64
}

/// Bones of the 22-joint hand: wrist, palm, then four joints per finger
/// from thumb to pinky.
pub const HAND_BONES: [(usize, usize); 21] = [
    (0, 1),
    (0, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (1, 6),
    (6, 7),
    (7, 8),
    (8, 9),
    (1, 10),
    (10, 11),
    (11, 12),
    (12, 13),
    (1, 14),
    (14, 15),
    (15, 16),
    (16, 17),
    (1, 18),
    (18, 19),
    (19, 20),
    (20, 21),
];

fn bones_for(joint_count: usize) -> &'static [(usize, usize)] {
    if joint_count == HAND_JOINTS {
        &HAND_BONES
    } else {
        &[]
    }
}

struct Canvas {
    img: Vec<u8>,
    width: usize,
    clip: (usize, usize, usize, usize),
}

impl Canvas {
    fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.img[i..i + 3].copy_from_slice(&rgb);
    }

    /// Clipped pixel bounding box of `[lo, hi]` along one axis.
    fn span<S: Scalar>(lo: S, hi: S, min: usize, max: usize) -> Option<(usize, usize)> {
        let lo = lo.ceil().max(S::from_usize_lossy(min));
        let hi = hi.floor().min(S::from_usize_lossy(max));
        // NaN bounds compare as None and fall out here too
        if !lo.partial_cmp(&hi).is_some_and(|o| o.is_le()) {
            return None;
        }
        Some((lo.to_usize()?, hi.to_usize()?))
    }

    fn disk<S: Scalar>(&mut self, (cx, cy): (S, S), r: S, rgb: [u8; 3]) {
        let (x0, y0, x1, y1) = self.clip;
        let Some((xa, xb)) = Self::span(cx - r, cx + r, x0, x1) else {
            return;
        };
        let Some((ya, yb)) = Self::span(cy - r, cy + r, y0, y1) else {
            return;
        };
        let r2 = r * r;
        for y in ya..=yb {
            let dy = S::from_usize_lossy(y) - cy;
            for x in xa..=xb {
                let dx = S::from_usize_lossy(x) - cx;
                if dx * dx + dy * dy <= r2 {
                    self.put(x, y, rgb);
                }
            }
        }
    }

    fn segment<S: Scalar>(&mut self, a: (S, S), b: (S, S), half_width: S, rgb: [u8; 3]) {
        let (x0, y0, x1, y1) = self.clip;
        let Some((xa, xb)) =
            Self::span(a.0.min(b.0) - half_width, a.0.max(b.0) + half_width, x0, x1)
        else {
            return;
        };
        let Some((ya, yb)) =
            Self::span(a.1.min(b.1) - half_width, a.1.max(b.1) + half_width, y0, y1)
        else {
            return;
        };
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let len2 = ex * ex + ey * ey;
        let hw2 = half_width * half_width;
        for y in ya..=yb {
            let py = S::from_usize_lossy(y) - a.1;
            for x in xa..=xb {
                let px = S::from_usize_lossy(x) - a.0;
                let t = if len2 > S::zero() {
                    ((px * ex + py * ey) / len2).max(S::zero()).min(S::one())
                } else {
                    S::zero()
                };
                let (dx, dy) = (px - t * ex, py - t * ey);
                if dx * dx + dy * dy <= hw2 {
                    self.put(x, y, rgb);
                }
            }
        }
    }
}

/// Render every frame of `seq` into one RGB image.
pub fn render_sequence<S: Scalar>(
    seq: &SkeletonSequence<S>,
    view: Viewpoint<S>,
    settings: &RenderSettings,
) -> Result<Image> {
    settings.validate()?;
    if seq.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot render an empty sequence".into(),
        ));
    }
    if seq
        .frames()
        .iter()
        .flatten()
        .flatten()
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidParameter(
            "sequence has non-finite coordinates".into(),
        ));
    }

    let projected: Vec<Vec<(S, S)>> = seq
        .frames()
        .iter()
        .map(|f| f.iter().map(|&j| project(j, view)).collect())
        .collect();
    let (mut umin, mut umax) = (S::infinity(), S::neg_infinity());
    let (mut vmin, mut vmax) = (S::infinity(), S::neg_infinity());
    for &(u, v) in projected.iter().flatten() {
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let (du, dv) = (umax - umin, vmax - vmin);

    let clip = settings.inset_rect();
    let inner_w = S::from_usize_lossy(clip.2 - clip.0);
    let inner_h = S::from_usize_lossy(clip.3 - clip.1);
    let two = S::lit(2.0);
    let r = S::lit(settings.joint_radius)
        .min(inner_w / two)
        .min(inner_h / two);
    let avail_w = inner_w - two * r;
    let avail_h = inner_h - two * r;
    let fit = |avail: S, extent: S| {
        if extent > S::zero() && extent.is_finite() {
            Some(avail / extent)
        } else {
            None
        }
    };
    let scale = match (fit(avail_w, du), fit(avail_h, dv)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => S::zero(),
    };
    let du = if du.is_finite() { du } else { S::zero() };
    let dv = if dv.is_finite() { dv } else { S::zero() };
    let left = S::from_usize_lossy(clip.0) + r + (avail_w - du * scale) / two;
    let top = S::from_usize_lossy(clip.1) + r + (avail_h - dv * scale) / two;
    let to_px = |(u, v): (S, S)| (left + (u - umin) * scale, top + (vmax - v) * scale);

    let mut canvas = Canvas {
        img: vec![0; settings.width * settings.height * 3],
        width: settings.width,
        clip,
    };
    let bones = if settings.draw_bones {
        bones_for(seq.joint_count())
    } else {
        &[]
    };
    let half_bone = (r / S::lit(3.0)).max(S::lit(0.5));
    let last = projected.len().saturating_sub(1);
    for (t, frame) in projected.iter().enumerate() {
        let tf = if last == 0 {
            0.0
        } else {
            t as f64 / last as f64
        };
        let rgb = color_ramp(tf);
        let pts: Vec<(S, S)> = frame.iter().map(|&p| to_px(p)).collect();
        for &(a, b) in bones {
            canvas.segment(pts[a], pts[b], half_bone, rgb);
        }
        for &p in &pts {
            canvas.disk(p, r, rgb);
        }
    }
    Image::new(settings.width, settings.height, 3, canvas.img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_projections_drop_one_axis() {
        let j = [1.0, 2.0, 3.0];
        assert_eq!(project(j, Viewpoint::TopDown), (1.0, 3.0));
        assert_eq!(project(j, Viewpoint::FrontAway), (1.0, 2.0));
        assert_eq!(project(j, Viewpoint::SideLeft), (3.0, 2.0));
    }

    #[test]
    fn custom_zero_is_front_away() {
        let mut s = 12345u64;
        for _ in 0..200 {
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 10.0
            };
            let j = [next(), next(), next()];
            let v = Viewpoint::Custom {
                azimuth_deg: 0.0,
                elevation_deg: 0.0,
            };
            assert_eq!(project(j, v), project(j, Viewpoint::FrontAway));
        }
    }

    #[test]
    fn custom_quarter_turn_matches_side_view() {
        // a 90° azimuth turn brings +z to the right, like the side view up to sign
        let j = [1.0, 2.0, 3.0];
        let v = Viewpoint::Custom {
            azimuth_deg: 90.0,
            elevation_deg: 0.0,
        };
        assert_eq!(project(j, v), (3.0, 2.0));
        let top = Viewpoint::Custom {
            azimuth_deg: 0.0,
            elevation_deg: 90.0,
        };
        assert_eq!(project(j, top), (1.0, -3.0));
    }

    #[test]
    fn viewpoint_text_form() {
        for s in ["top-down", "front-away", "side-left", "custom:30,-15"] {
            let v: Viewpoint = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("custom:1".parse::<Viewpoint>().is_err());
        assert!("diagonal".parse::<Viewpoint>().is_err());
    }

    #[test]
    fn ramp_luminance_strictly_increases() {
        let mut prev = -1.0;
        for i in 0..=239 {
            let l = luminance(&color_ramp(i as f64 / 239.0));
            assert!(l > prev, "step {i}");
            prev = l;
        }
        assert!(luminance(&color_ramp(0.0)) > 0.0);
    }

    #[test]
    fn settings_validation() {
        let ok = RenderSettings::default();
        assert!(ok.validate().is_ok());
        assert!(RenderSettings { width: 31, ..ok }.validate().is_err());
        assert!(RenderSettings { margin: 0.4, ..ok }.validate().is_err());
        assert!(RenderSettings {
            joint_radius: -1.0,
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn single_frame_uses_ramp_start() {
        let frames = vec![(0..22).map(|j| [j as f64, (j * j) as f64, 0.0]).collect()];
        let seq = SkeletonSequence::new(22, frames).unwrap();
        let img = render_sequence(&seq, Viewpoint::FrontAway, &RenderSettings::default()).unwrap();
        let start = color_ramp(0.0);
        let mut drawn = 0;
        for px in img.data().chunks_exact(3) {
            if px != [0, 0, 0] {
                assert_eq!(px, start);
                drawn += 1;
            }
        }
        assert!(drawn > 0);
    }

    #[test]
    fn empty_and_non_finite_rejected() {
        let s = RenderSettings::default();
        let empty = SkeletonSequence::<f64>::new(22, vec![]).unwrap();
        assert!(render_sequence(&empty, Viewpoint::TopDown, &s).is_err());
        let nan = SkeletonSequence::new(1, vec![vec![[f64::NAN, 0.0, 0.0]]]).unwrap();
        assert!(render_sequence(&nan, Viewpoint::TopDown, &s).is_err());
    }

    #[test]
    fn degenerate_extent_draws_centered_disk() {
        let seq = SkeletonSequence::new(3, vec![vec![[5.0, 5.0, 5.0]; 3]; 4]).unwrap();
        let s = RenderSettings {
            width: 33,
            height: 33,
            margin: 0.0,
            joint_radius: 2.0,
            draw_bones: false,
        };
        let img = render_sequence(&seq, Viewpoint::TopDown, &s).unwrap();
        let lit: Vec<(usize, usize)> = (0..33)
            .flat_map(|y| (0..33).map(move |x| (x, y)))
            .filter(|&(x, y)| img.pixel(x, y) != [0, 0, 0])
            .collect();
        assert!(lit.contains(&(16, 16)));
        let (sx, sy) = lit.iter().fold((0, 0), |(a, b), &(x, y)| (a + x, b + y));
        assert_eq!((sx / lit.len(), sy / lit.len()), (16, 16));
        assert!(lit
            .iter()
            .all(|&(x, y)| x.abs_diff(16) <= 2 && y.abs_diff(16) <= 2));
    }
}
