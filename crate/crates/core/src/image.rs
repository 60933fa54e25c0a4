//! Grayscale image container and the intensity-level preprocessing used
//! throughout the crate.
//!
//! Intensities are kept as `f64` in the canonical range `[0, 255]`; values
//! are only quantized when written to disk.

use crate::error::{Error, Result};

/// Rounds half-up (`41.5 -> 42`, `-0.5 -> 0`). The single rounding rule
/// used everywhere a value is quantized.
#[inline]
pub fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}

/// Quantizes one intensity to a byte: half-up rounding, then clipping.
#[inline]
pub fn quantize_value(v: f64) -> u8 {
    round_half_up(v).clamp(0.0, 255.0) as u8
}

/// A row-major grid of real-valued grayscale intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(Error::InvalidDimensions { width, height })?;
        if pixels.len() != expected {
            return Err(Error::BufferLength {
                expected,
                found: pixels.len(),
            });
        }
        if let Some(i) = pixels.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    /// Internal constructor for buffers already known to satisfy the invariants.
    pub(crate) fn from_raw(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        debug_assert!(pixels.iter().all(|p| p.is_finite()));
        Self {
            width,
            height,
            pixels,
        }
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
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Pixel lookup with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.pixels[cy * self.width + cx]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            })
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// True when every intensity is an integer in `[0, 255]`.
    pub fn is_quantized(&self) -> bool {
        self.pixels
            .iter()
            .all(|&p| (0.0..=255.0).contains(&p) && p.fract() == 0.0)
    }

    /// Half-up rounding followed by clipping to `[0, 255]`.
    pub fn quantize(&self) -> Image {
        self.map(|p| f64::from(quantize_value(p)))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().map(|&p| quantize_value(p)).collect()
    }

    /// Applies `f` to every intensity. `f` must return finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image::from_raw(
            self.width,
            self.height,
            self.pixels.iter().map(|&p| f(p)).collect(),
        )
    }

    pub fn hflip(&self) -> Image {
        let mut out = Vec::with_capacity(self.pixels.len());
        for y in 0..self.height {
            out.extend(self.row(y).iter().rev());
        }
        Image::from_raw(self.width, self.height, out)
    }

    pub fn vflip(&self) -> Image {
        let mut out = Vec::with_capacity(self.pixels.len());
        for y in (0..self.height).rev() {
            out.extend_from_slice(self.row(y));
        }
        Image::from_raw(self.width, self.height, out)
    }

    /// Pads right and bottom edges by replication up to `new_w x new_h`.
    pub fn pad_replicate(&self, new_w: usize, new_h: usize) -> Image {
        debug_assert!(new_w >= self.width && new_h >= self.height);
        let mut out = Vec::with_capacity(new_w * new_h);
        for y in 0..new_h {
            let row = self.row(y.min(self.height - 1));
            out.extend_from_slice(row);
            let last = row[self.width - 1];
            out.extend(std::iter::repeat_n(last, new_w - self.width));
        }
        Image::from_raw(new_w, new_h, out)
    }

    /// Top-left `w x h` window.
    pub fn crop(&self, w: usize, h: usize) -> Image {
        debug_assert!(w <= self.width && h <= self.height);
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            out.extend_from_slice(&self.row(y)[..w]);
        }
        Image::from_raw(w, h, out)
    }

    pub(crate) fn ensure_same_dims(&self, other: &Image) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }
}

/// Row-major 8-bit RGB triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        if pixels.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_interleaved(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 3 * width * height {
            return Err(Error::BufferLength {
                expected: 3 * width * height,
                found: bytes.len(),
            });
        }
        Self::new(
            width,
            height,
            bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// BT.601 luma, rounded half-up.
pub fn to_grayscale(rgb: &RgbImage) -> Image {
    let pixels = rgb
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            round_half_up(0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b))
        })
        .collect();
    Image::from_raw(rgb.width, rgb.height, pixels)
}

/// Nearest-neighbour resampling; source index is `floor((i + 0.5) * old / new)`.
pub fn resize_nearest(image: &Image, new_w: usize, new_h: usize) -> Result<Image> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::InvalidDimensions {
            width: new_w,
            height: new_h,
        });
    }
    let (old_w, old_h) = image.dims();
    let src = |i: usize, old: usize, new: usize| -> usize {
        let s = ((i as f64 + 0.5) * old as f64 / new as f64).floor() as usize;
        s.min(old - 1)
    };
    let xs: Vec<usize> = (0..new_w).map(|i| src(i, old_w, new_w)).collect();
    let mut out = Vec::with_capacity(new_w * new_h);
    for y in 0..new_h {
        let row = image.row(src(y, old_h, new_h));
        out.extend(xs.iter().map(|&x| row[x]));
    }
    Ok(Image::from_raw(new_w, new_h, out))
}

/// Clips to `[lo, hi]`, or with `stretch` affinely maps `[min, max]` of the
/// image onto `[lo, hi]`. A constant image stretches to the midpoint.
pub fn normalize_clip(image: &Image, lo: f64, hi: f64, stretch: bool) -> Result<Image> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if !stretch {
        return Ok(image.map(|p| p.clamp(lo, hi)));
    }
    let (min, max) = image.min_max();
    if max == min {
        let mid = (lo + hi) / 2.0;
        return Ok(image.map(|_| mid));
    }
    let (span, range) = (max - min, hi - lo);
    Ok(image.map(|p| ((p - min) / span * range + lo).clamp(lo, hi)))
}
