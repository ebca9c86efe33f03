//! 8-bit raster type shared by every transform, plus PNG encode/decode.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest accepted width or height.
pub const MAX_SIDE: usize = 1 << 24;

/// Dense row-major, channel-interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if width > MAX_SIDE || height > MAX_SIDE {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} exceeds the maximum side of {MAX_SIDE}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "only 1 or 3 channels are supported, got {channels}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidImage("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {width}x{height}x{channels} = {expected}",
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    /// Image with every channel of every pixel set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        let len = width.saturating_mul(height).saturating_mul(channels);
        Image::new(width, height, channels, vec![value; len])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Image::new(width, height, channels, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Channel values of one pixel.
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.dims() == other.dims()
    }

    /// New image of identical shape, one output value per input channel value.
    pub fn map_values(&self, f: impl Fn(u8) -> u8) -> Image {
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Encode as an 8-bit PNG (gray or RGB, no alpha).
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(if self.channels == 1 {
                png::ColorType::Grayscale
            } else {
                png::ColorType::Rgb
            });
            enc.set_depth(png::BitDepth::Eight);
            enc.set_compression(png::Compression::Fast);
            // adaptive filter selection dominates encode time; Paeth alone
            // compresses smooth content about as well
            enc.set_filter(png::Filter::Paeth);
            let mut writer = enc.write_header().map_err(|e| Error::Png(e.to_string()))?;
            writer
                .write_image_data(&self.data)
                .map_err(|e| Error::Png(e.to_string()))?;
            writer.finish().map_err(|e| Error::Png(e.to_string()))?;
        }
        Ok(out)
    }

    /// Decode an 8-bit gray or RGB PNG. Palette and low-bit-depth gray are expanded;
    /// alpha and 16-bit images are rejected.
    pub fn decode_png(bytes: &[u8]) -> Result<Image> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        decoder.set_transformations(png::Transformations::EXPAND);
        let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| Error::Png("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader
            .next_frame(&mut buf)
            .map_err(|e| Error::Png(e.to_string()))?;
        if info.bit_depth != png::BitDepth::Eight {
            return Err(Error::Png(format!(
                "unsupported bit depth {:?}",
                info.bit_depth
            )));
        }
        let channels = match info.color_type {
            png::ColorType::Grayscale => 1,
            png::ColorType::Rgb => 3,
            other => return Err(Error::Png(format!("unsupported color type {other:?}"))),
        };
        buf.truncate(info.buffer_size());
        Image::new(info.width as usize, info.height as usize, channels, buf)
    }

    pub fn read_png(path: &Path) -> Result<Image> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Image::decode_png(&bytes)
    }

    /// Writes the PNG and returns the encoded bytes (for digesting).
    pub fn write_png(&self, path: &Path) -> Result<Vec<u8>> {
        let bytes = self.encode_png()?;
        fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
        Ok(bytes)
    }
}

/// `(width, height, channels)` from a PNG header without decoding pixels.
pub fn png_dims(path: &Path) -> Result<(usize, usize, usize)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = png::Decoder::new(std::io::BufReader::new(file))
        .read_info()
        .map_err(|e| Error::Png(e.to_string()))?;
    let info = reader.info();
    Ok((
        info.width as usize,
        info.height as usize,
        info.color_type.samples(),
    ))
}

/// Per-channel arithmetic mean over all pixels.
pub fn image_mean(img: &Image) -> Vec<f64> {
    let c = img.channels();
    let mut sums = vec![0u64; c];
    for px in img.data().chunks_exact(c) {
        for (s, &v) in sums.iter_mut().zip(px) {
            *s += v as u64;
        }
    }
    let n = (img.width() * img.height()) as f64;
    sums.into_iter().map(|s| s as f64 / n).collect()
}
