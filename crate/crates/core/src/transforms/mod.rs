//! Geometric and photometric transforms, and their fixed composition
//! crop → rotate → zoom → brightness → contrast.
//!
//! Every op reads 8-bit pixels, computes in the scalar type `S`, and quantizes
//! once at its output (round half away from zero, clamp to [0, 255]).
//! Geometric ops use inverse mapping with bilinear interpolation; pixel
//! centers sit at integer coordinates.

mod params;

pub use params::{
    AugmentationParams, RangeViolation, BETA_RANGE, CROP_SCALES, GAMMA_RANGE, OFFSET_RANGE,
    THETA_RANGE, ZETA_RANGE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{image_mean, Image};
use crate::scalar::{quantize, sin_cos_deg, Scalar};

/// Mid-gray contrast pivot.
pub const CONTRAST_PIVOT: f64 = 127.5;

/// Per-transform enable flags. A disabled transform is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toggles {
    pub crop: bool,
    pub rotate: bool,
    pub zoom: bool,
    pub brightness_contrast: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles::all()
    }
}

impl Toggles {
    pub fn all() -> Self {
        Toggles {
            crop: true,
            rotate: true,
            zoom: true,
            brightness_contrast: true,
        }
    }

    pub fn none() -> Self {
        Toggles {
            crop: false,
            rotate: false,
            zoom: false,
            brightness_contrast: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotMode {
    /// Fixed pivot at 127.5.
    #[default]
    MidGray,
    /// Per-channel mean of the image being adjusted.
    ImageMean,
}

/// Knobs around the chain that are not sampled per image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub toggles: Toggles,
    /// Value written where rotation or zoom reads outside the source.
    pub fill: u8,
    pub pivot: PivotMode,
    /// Resize the crop window back to the input size.
    pub crop_resize: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            toggles: Toggles::all(),
            fill: 0,
            pivot: PivotMode::MidGray,
            crop_resize: true,
        }
    }
}

/// Crop window `(x0, y0, width, height)` for a given scale and offset fractions.
pub fn crop_window<S: Scalar>(
    width: usize,
    height: usize,
    scale: S,
    offset_x: S,
    offset_y: S,
) -> Result<(usize, usize, usize, usize)> {
    let scale = scale.to_f64_lossy();
    let (ox, oy) = (offset_x.to_f64_lossy(), offset_y.to_f64_lossy());
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "crop scale {scale} outside (0, 1]"
        )));
    }
    if !(0.0..=1.0).contains(&ox) || !(0.0..=1.0).contains(&oy) {
        return Err(Error::InvalidParameter(format!(
            "crop offsets ({ox}, {oy}) outside [0, 1]"
        )));
    }
    // absorbs representation error of the scale, e.g. 0.95f32 * 100 = 94.9999988
    const SLACK: f64 = 1e-4;
    let cw = (scale * width as f64 + SLACK).floor() as usize;
    let ch = (scale * height as f64 + SLACK).floor() as usize;
    if cw == 0 || ch == 0 {
        return Err(Error::InvalidParameter(format!(
            "crop of {width}x{height} at scale {scale} is empty"
        )));
    }
    let cw = cw.min(width);
    let ch = ch.min(height);
    let x0 = (ox * (width - cw) as f64).round() as usize;
    let y0 = (oy * (height - ch) as f64).round() as usize;
    Ok((x0, y0, cw, ch))
}

/// Crop the window selected by `scale` and the offset fractions, without resizing.
pub fn crop_unscaled<S: Scalar>(img: &Image, scale: S, offset_x: S, offset_y: S) -> Result<Image> {
    let (x0, y0, cw, ch) = crop_window(img.width(), img.height(), scale, offset_x, offset_y)?;
    let c = img.channels();
    let mut data = Vec::with_capacity(cw * ch * c);
    for y in y0..y0 + ch {
        let start = (y * img.width() + x0) * c;
        data.extend_from_slice(&img.data()[start..start + cw * c]);
    }
    Image::new(cw, ch, c, data)
}

/// Random-crop transform: extract the window and resize it back to W×H.
pub fn crop<S: Scalar>(img: &Image, scale: S, offset_x: S, offset_y: S) -> Result<Image> {
    let window = crop_unscaled(img, scale, offset_x, offset_y)?;
    if window.same_dims(img) {
        return Ok(window);
    }
    Ok(resize_bilinear::<S>(&window, img.width(), img.height()))
}

/// Per-axis sample positions for a half-pixel-centered resize.
fn resize_taps<S: Scalar>(src_len: usize, dst_len: usize) -> Vec<(usize, usize, S)> {
    let ratio = S::from_usize_lossy(src_len) / S::from_usize_lossy(dst_len);
    let half = S::lit(0.5);
    let max = S::from_usize_lossy(src_len - 1);
    (0..dst_len)
        .map(|d| {
            let s = ((S::from_usize_lossy(d) + half) * ratio - half)
                .max(S::zero())
                .min(max);
            // SAFETY: s is clamped to [0, len - 1] and image sides are below 2^31
            let i0 = unsafe { s.trunc_index() };
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - S::from_usize_lossy(i0))
        })
        .collect()
}

/// Bilinear resize with half-pixel centers and edge clamping.
pub fn resize_bilinear<S: Scalar>(img: &Image, width: usize, height: usize) -> Image {
    let xs = resize_taps::<S>(img.width(), width);
    let ys: Vec<_> = resize_taps::<S>(img.height(), height)
        .into_iter()
        .map(Some)
        .collect();
    let mut data = vec![0u8; width * height * img.channels()];
    resample_rows(img, &mut data, width, 0, &xs, &ys);
    Image::new(width, height, img.channels(), data).expect("resize output shape is consistent")
}

/// Horizontal half of the bilinear blend for one source row.
fn blend_row<S: Scalar>(src: &[u8], c: usize, xs: &[(usize, usize, S)], out: &mut Vec<S>) {
    out.resize(xs.len() * c, S::zero());
    for (o, &(x0, x1, fx)) in out.chunks_exact_mut(c).zip(xs) {
        let (a, b) = (&src[x0 * c..x0 * c + c], &src[x1 * c..x1 * c + c]);
        for ch in 0..c {
            let p = S::from_byte(a[ch]);
            o[ch] = p + (S::from_byte(b[ch]) - p) * fx;
        }
    }
}

/// Separable bilinear resampling. Output row `r` blends source rows `ys[r]`
/// (skipped when `None`), writing columns `first..first + xs.len()`.
fn resample_rows<S: Scalar>(
    img: &Image,
    data: &mut [u8],
    out_width: usize,
    first: usize,
    xs: &[(usize, usize, S)],
    ys: &[Option<(usize, usize, S)>],
) {
    let c = img.channels();
    let stride = img.width() * c;
    let src_row = |y: usize| &img.data()[y * stride..(y + 1) * stride];
    // horizontal blends of the two most recent source rows
    let mut cache: [(usize, Vec<S>); 2] = [(usize::MAX, Vec::new()), (usize::MAX, Vec::new())];
    for (row, tap) in data.chunks_exact_mut(out_width * c).zip(ys) {
        let Some((y0, y1, fy)) = *tap else { continue };
        for y in [y0, y1] {
            if cache[0].0 != y && cache[1].0 != y {
                // evict the slot not holding the other row of this pair
                let slot = if cache[0].0 == y0 || cache[0].0 == y1 {
                    1
                } else {
                    0
                };
                blend_row(src_row(y), c, xs, &mut cache[slot].1);
                cache[slot].0 = y;
            }
        }
        let get = |y: usize| {
            if cache[0].0 == y {
                &cache[0].1
            } else {
                &cache[1].1
            }
        };
        let (top, bottom) = (get(y0), get(y1));
        let out = &mut row[first * c..(first + xs.len()) * c];
        for ((o, &t), &b) in out.iter_mut().zip(top).zip(bottom) {
            *o = quantize(t + (b - t) * fy);
        }
    }
}

#[inline(always)]
fn lerp2<S: Scalar>(p00: u8, p10: u8, p01: u8, p11: u8, fx: S, fy: S) -> S {
    let v = S::from_byte;
    let top = v(p00) + (v(p10) - v(p00)) * fx;
    let bottom = v(p01) + (v(p11) - v(p01)) * fx;
    top + (bottom - top) * fy
}

/// Inverse-mapping warp: `map(x, y)` gives the source coordinate for each
/// destination pixel. Sources outside the image (beyond a rounding epsilon)
/// produce `fill`.
fn warp<S: Scalar>(img: &Image, fill: u8, map: impl Fn(S, S) -> (S, S)) -> Image {
    match img.channels() {
        1 => warp_c::<S, 1>(img, fill, map),
        3 => warp_c::<S, 3>(img, fill, map),
        _ => warp_dyn(img, fill, map),
    }
}

/// Clamped source position: base pixel, neighbor steps and fractions.
#[inline(always)]
fn tap<S: Scalar>(sx: S, sy: S, w: usize, h: usize) -> (usize, usize, usize, usize, S, S) {
    let max_x = S::from_usize_lossy(w - 1);
    let max_y = S::from_usize_lossy(h - 1);
    let sx = sx.max(S::zero()).min(max_x);
    let sy = sy.max(S::zero()).min(max_y);
    // SAFETY: both are clamped to [0, side - 1] and image sides are below 2^31
    let (x0, y0) = unsafe { (sx.trunc_index(), sy.trunc_index()) };
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    (
        x0,
        y0,
        x1,
        y1,
        sx - S::from_usize_lossy(x0),
        sy - S::from_usize_lossy(y0),
    )
}

#[inline(always)]
fn inside<S: Scalar>(sx: S, sy: S, w: usize, h: usize) -> bool {
    let eps = S::epsilon().sqrt();
    sx >= -eps
        && sy >= -eps
        && sx <= S::from_usize_lossy(w - 1) + eps
        && sy <= S::from_usize_lossy(h - 1) + eps
}

fn warp_c<S: Scalar, const C: usize>(img: &Image, fill: u8, map: impl Fn(S, S) -> (S, S)) -> Image {
    let (w, h, _) = img.dims();
    let src: Vec<S> = img.data().iter().map(|&v| S::from_byte(v)).collect();
    let mut data = vec![fill; w * h * C];
    for (y, row) in data.chunks_exact_mut(w * C).enumerate() {
        let yf = S::from_usize_lossy(y);
        for (x, out) in row.chunks_exact_mut(C).enumerate() {
            let (sx, sy) = map(S::from_usize_lossy(x), yf);
            if !inside(sx, sy, w, h) {
                continue;
            }
            let (x0, y0, x1, y1, fx, fy) = tap(sx, sy, w, h);
            // the four taps as offsets from the top-left one
            let base = (y0 * w + x0) * C;
            let (dx, dy) = ((x1 - x0) * C, (y1 - y0) * w * C);
            let quad = &src[base..=base + dx + dy + C - 1];
            let px = |o: usize| -> &[S; C] { quad[o..o + C].try_into().unwrap() };
            let (a, b, d, e) = (px(0), px(dx), px(dy), px(dx + dy));
            for ch in 0..C {
                let top = a[ch] + (b[ch] - a[ch]) * fx;
                let bottom = d[ch] + (e[ch] - d[ch]) * fx;
                out[ch] = quantize(top + (bottom - top) * fy);
            }
        }
    }
    Image::new(w, h, C, data).expect("warp output shape is consistent")
}

fn warp_dyn<S: Scalar>(img: &Image, fill: u8, map: impl Fn(S, S) -> (S, S)) -> Image {
    let (w, h, c) = img.dims();
    let mut data = vec![fill; w * h * c];
    for (y, row) in data.chunks_exact_mut(w * c).enumerate() {
        let yf = S::from_usize_lossy(y);
        for (x, out) in row.chunks_exact_mut(c).enumerate() {
            let (sx, sy) = map(S::from_usize_lossy(x), yf);
            if !inside(sx, sy, w, h) {
                continue;
            }
            let (x0, y0, x1, y1, fx, fy) = tap(sx, sy, w, h);
            let (a, b, d, e) = (
                img.pixel(x0, y0),
                img.pixel(x1, y0),
                img.pixel(x0, y1),
                img.pixel(x1, y1),
            );
            for ch in 0..c {
                out[ch] = quantize(lerp2(a[ch], b[ch], d[ch], e[ch], fx, fy));
            }
        }
    }
    Image::new(w, h, c, data).expect("warp output shape is consistent")
}

fn center<S: Scalar>(img: &Image) -> (S, S) {
    let half = S::lit(0.5);
    (
        S::from_usize_lossy(img.width() - 1) * half,
        S::from_usize_lossy(img.height() - 1) * half,
    )
}

/// Rotate counter-clockwise (as displayed, y pointing down) by `theta_deg`
/// about `((W-1)/2, (H-1)/2)`. Uncovered pixels are black.
pub fn rotate<S: Scalar>(img: &Image, theta_deg: S) -> Result<Image> {
    rotate_filled(img, theta_deg, 0)
}

pub fn rotate_filled<S: Scalar>(img: &Image, theta_deg: S, fill: u8) -> Result<Image> {
    if !theta_deg.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rotation angle {theta_deg} is not finite"
        )));
    }
    let (sin, cos) = sin_cos_deg(theta_deg);
    let (cx, cy) = center::<S>(img);
    Ok(warp(img, fill, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + cos * dx - sin * dy, cy + sin * dx + cos * dy)
    }))
}

/// Scale about the image center by `zeta`; `zeta > 1` magnifies, `zeta < 1`
/// shrinks and leaves a black band.
pub fn zoom<S: Scalar>(img: &Image, zeta: S) -> Result<Image> {
    zoom_filled(img, zeta, 0)
}

pub fn zoom_filled<S: Scalar>(img: &Image, zeta: S, fill: u8) -> Result<Image> {
    if !(zeta > S::zero() && zeta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "zoom factor {zeta} must be positive"
        )));
    }
    let (cx, cy) = center::<S>(img);
    let inv = S::one() / zeta;
    // the map is axis-aligned, so per-axis taps reproduce the per-pixel warp exactly
    let xs = axis_taps(img.width(), |x| cx + (x - cx) * inv);
    let ys = axis_taps(img.height(), |y| cy + (y - cy) * inv);
    Ok(separable_warp(img, fill, &xs, &ys))
}

/// Per-axis version of the warp's bounds test and clamped tap, `None` when outside.
fn axis_taps<S: Scalar>(len: usize, map: impl Fn(S) -> S) -> Vec<Option<(usize, usize, S)>> {
    let eps = S::epsilon().sqrt();
    let max = S::from_usize_lossy(len - 1);
    (0..len)
        .map(|d| {
            let s = map(S::from_usize_lossy(d));
            if !(s >= -eps && s <= max + eps) {
                return None;
            }
            let s = s.max(S::zero()).min(max);
            // SAFETY: s is clamped to [0, len - 1] and image sides are below 2^31
            let i0 = unsafe { s.trunc_index() };
            Some((i0, (i0 + 1).min(len - 1), s - S::from_usize_lossy(i0)))
        })
        .collect()
}

fn separable_warp<S: Scalar>(
    img: &Image,
    fill: u8,
    xs: &[Option<(usize, usize, S)>],
    ys: &[Option<(usize, usize, S)>],
) -> Image {
    let (w, h, c) = img.dims();
    let mut data = vec![fill; w * h * c];
    // columns that read inside the source form one contiguous run
    if let Some(first) = xs.iter().position(Option::is_some) {
        let inner: Vec<(usize, usize, S)> = xs.iter().flatten().copied().collect();
        resample_rows(img, &mut data, w, first, &inner, ys);
    }
    Image::new(w, h, c, data).expect("warp output shape is consistent")
}

fn lut(f: impl Fn(u8) -> u8) -> [u8; 256] {
    let mut t = [0u8; 256];
    for (v, slot) in t.iter_mut().enumerate() {
        *slot = f(v as u8);
    }
    t
}

fn brightness_table<S: Scalar>(beta: S) -> Result<[u8; 256]> {
    if !(beta > S::zero() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "brightness factor {beta} must be positive"
        )));
    }
    Ok(lut(|v| quantize(beta * S::from_byte(v))))
}

fn contrast_tables<S: Scalar>(img: &Image, gamma: S, pivot: PivotMode) -> Result<Vec<[u8; 256]>> {
    if !(gamma > S::zero() && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "contrast factor {gamma} must be positive"
        )));
    }
    let pivots: Vec<S> = match pivot {
        PivotMode::MidGray => vec![S::lit(CONTRAST_PIVOT); img.channels()],
        PivotMode::ImageMean => image_mean(img).into_iter().map(S::lit).collect(),
    };
    Ok(pivots
        .iter()
        .map(|&p| lut(|v| quantize((S::from_byte(v) - p) * gamma + p)))
        .collect())
}

/// Apply one lookup table per channel.
fn apply_tables(img: &Image, tables: &[[u8; 256]]) -> Image {
    let mut data = img.data().to_vec();
    match tables {
        [t] => data.iter_mut().for_each(|v| *v = t[*v as usize]),
        [r, g, b] => {
            for px in data.chunks_exact_mut(3) {
                px[0] = r[px[0] as usize];
                px[1] = g[px[1] as usize];
                px[2] = b[px[2] as usize];
            }
        }
        _ => {
            for px in data.chunks_exact_mut(tables.len()) {
                for (v, t) in px.iter_mut().zip(tables) {
                    *v = t[*v as usize];
                }
            }
        }
    }
    Image::new(img.width(), img.height(), img.channels(), data).expect("same shape as input")
}

/// `v ↦ clamp(round(beta * v))`.
pub fn adjust_brightness<S: Scalar>(img: &Image, beta: S) -> Result<Image> {
    let t = brightness_table(beta)?;
    Ok(apply_tables(img, &vec![t; img.channels()]))
}

/// `v ↦ clamp(round((v - 127.5) * gamma + 127.5))`.
pub fn adjust_contrast<S: Scalar>(img: &Image, gamma: S) -> Result<Image> {
    adjust_contrast_with_pivot(img, gamma, PivotMode::MidGray)
}

pub fn adjust_contrast_with_pivot<S: Scalar>(
    img: &Image,
    gamma: S,
    pivot: PivotMode,
) -> Result<Image> {
    let tables = contrast_tables(img, gamma, pivot)?;
    Ok(apply_tables(img, &tables))
}

/// Brightness then contrast. Both are per-value maps, so with a fixed pivot
/// they compose into one table per channel with identical output.
fn adjust_brightness_contrast<S: Scalar>(
    img: &Image,
    beta: S,
    gamma: S,
    pivot: PivotMode,
) -> Result<Image> {
    if pivot == PivotMode::ImageMean {
        // the pivot depends on the brightened image
        return adjust_contrast_with_pivot(&adjust_brightness(img, beta)?, gamma, pivot);
    }
    let b = brightness_table(beta)?;
    let tables: Vec<[u8; 256]> = contrast_tables(img, gamma, pivot)?
        .iter()
        .map(|c| lut(|v| c[b[v as usize] as usize]))
        .collect();
    Ok(apply_tables(img, &tables))
}

/// Full chain with default settings: crop → rotate → zoom → brightness → contrast.
pub fn apply_chain<S: Scalar>(img: &Image, params: &AugmentationParams<S>) -> Result<Image> {
    apply_chain_with(img, params, &ChainConfig::default())
}

pub fn apply_chain_with<S: Scalar>(
    img: &Image,
    params: &AugmentationParams<S>,
    config: &ChainConfig,
) -> Result<Image> {
    let t = &config.toggles;
    let mut out = if t.crop {
        if config.crop_resize {
            crop(
                img,
                params.crop_scale,
                params.crop_offset_x,
                params.crop_offset_y,
            )?
        } else {
            crop_unscaled(
                img,
                params.crop_scale,
                params.crop_offset_x,
                params.crop_offset_y,
            )?
        }
    } else {
        img.clone()
    };
    if t.rotate {
        out = rotate_filled(&out, params.theta_deg, config.fill)?;
    }
    if t.zoom {
        out = zoom_filled(&out, params.zeta, config.fill)?;
    }
    if t.brightness_contrast {
        out = adjust_brightness_contrast(&out, params.beta, params.gamma, config.pivot)?;
    }
    Ok(out)
}
