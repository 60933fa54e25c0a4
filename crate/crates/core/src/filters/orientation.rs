//! Block-wise ridge orientation (gradient method) and ridge frequency
//! (oriented-window signature) estimation.
//!
//! Angles are measured in pixel coordinates (x right, y down) from the
//! x-axis and describe the ridge direction, i.e. perpendicular to the
//! dominant gradient. Vertical ridges have `theta = pi/2`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;

/// Valid ridge frequencies (cycles/pixel): ridge periods of 3 to 25 pixels.
pub const MIN_RIDGE_FREQUENCY: f64 = 1.0 / 25.0;
pub const MAX_RIDGE_FREQUENCY: f64 = 1.0 / 3.0;
/// Bin count for the optional orientation quantization.
pub const DEFAULT_ORIENTATION_BINS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    block_size: usize,
    cols: usize,
    rows: usize,
    angles: Vec<f64>,
    coherence: Vec<f64>,
}

impl OrientationField {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Grid size in blocks: `(ceil(w / bs), ceil(h / bs))`.
    pub fn grid_dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn angle(&self, bx: usize, by: usize) -> f64 {
        self.angles[by * self.cols + bx]
    }

    pub fn coherence(&self, bx: usize, by: usize) -> f64 {
        self.coherence[by * self.cols + bx]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn coherences(&self) -> &[f64] {
        &self.coherence
    }

    /// Snaps every angle onto `bins` equally spaced directions over `[0, pi)`.
    pub fn quantized(&self, bins: usize) -> Self {
        Self {
            angles: self
                .angles
                .iter()
                .map(|&a| quantize_angle(a, bins))
                .collect(),
            ..self.clone()
        }
    }
}

/// Nearest of `bins` directions `k pi / bins`, wrapped into `[0, pi)`.
pub fn quantize_angle(theta: f64, bins: usize) -> f64 {
    let step = PI / bins as f64;
    let k = (theta / step).round() as i64;
    k.rem_euclid(bins as i64) as f64 * step
}

fn sobel(image: &Image) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = image.dims();
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    gx.par_chunks_mut(w)
        .zip(gy.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (rx, ry))| {
            let y = y as isize;
            for x in 0..w as isize {
                let p = |dx: isize, dy: isize| image.get_clamped(x + dx, y + dy);
                rx[x as usize] =
                    (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
                ry[x as usize] =
                    (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            }
        });
    (gx, gy)
}

/// Gradient-method orientation per `block_size` block with coherence
/// `|(Gxx - Gyy, 2 Gxy)| / (Gxx + Gyy)`. Flat blocks get angle 0 and
/// coherence 0.
pub fn estimate_orientation(image: &Image, block_size: usize) -> Result<OrientationField> {
    if block_size < 4 {
        return Err(Error::BlockTooSmall(block_size));
    }
    let (w, h) = image.dims();
    let (gx, gy) = sobel(image);
    let cols = w.div_ceil(block_size);
    let rows = h.div_ceil(block_size);
    let (angles, coherence): (Vec<f64>, Vec<f64>) = (0..cols * rows)
        .into_par_iter()
        .map(|b| {
            let (bx, by) = (b % cols, b / cols);
            let (mut gxx, mut gyy, mut gxy) = (0.0, 0.0, 0.0);
            for y in by * block_size..((by + 1) * block_size).min(h) {
                for x in bx * block_size..((bx + 1) * block_size).min(w) {
                    let (a, c) = (gx[y * w + x], gy[y * w + x]);
                    gxx += a * a;
                    gyy += c * c;
                    gxy += a * c;
                }
            }
            let energy = gxx + gyy;
            if energy == 0.0 {
                return (0.0, 0.0);
            }
            let (num, den) = (2.0 * gxy, gxx - gyy);
            let mut theta = 0.5 * num.atan2(den) + PI / 2.0;
            if theta >= PI {
                theta -= PI;
            }
            let coh = (num.hypot(den) / energy).clamp(0.0, 1.0);
            (theta, coh)
        })
        .unzip();
    Ok(OrientationField {
        block_size,
        cols,
        rows,
        angles,
        coherence,
    })
}

/// Ridge frequency per orientation block, `None` where no plausible
/// frequency was found.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMap {
    block_size: usize,
    cols: usize,
    rows: usize,
    values: Vec<Option<f64>>,
}

impl FrequencyMap {
    pub fn grid_dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn get(&self, bx: usize, by: usize) -> Option<f64> {
        self.values[by * self.cols + bx]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }
}

fn bilinear(image: &Image, x: f64, y: f64) -> f64 {
    let (w, h) = image.dims();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let top = image.get(x0, y0) * (1.0 - fx) + image.get(x1, y0) * fx;
    let bot = image.get(x0, y1) * (1.0 - fx) + image.get(x1, y1) * fx;
    top * (1.0 - fy) + bot * fy
}

/// Projection of a `window x block_size` oriented window centred on
/// `(cx, cy)`: sample `k` runs across the ridges, each averaged along them.
fn ridge_signature(
    image: &Image,
    cx: f64,
    cy: f64,
    theta: f64,
    window: usize,
    along: usize,
) -> Vec<f64> {
    let (tx, ty) = (theta.cos(), theta.sin());
    let (nx, ny) = (-ty, tx);
    let kc = (window as f64 - 1.0) / 2.0;
    let dc = (along as f64 - 1.0) / 2.0;
    (0..window)
        .map(|k| {
            let u = k as f64 - kc;
            (0..along)
                .map(|d| {
                    let v = d as f64 - dc;
                    bilinear(image, cx + u * nx + v * tx, cy + u * ny + v * ty)
                })
                .sum::<f64>()
                / along as f64
        })
        .collect()
}

/// Sub-sample peak positions: strict rise on the left, non-strict fall on
/// the right, above the signature mean, refined by a parabola fit.
fn signature_peaks(sig: &[f64]) -> Vec<f64> {
    let mean = sig.iter().sum::<f64>() / sig.len() as f64;
    let mut peaks = Vec::new();
    for k in 1..sig.len().saturating_sub(1) {
        let (a, b, c) = (sig[k - 1], sig[k], sig[k + 1]);
        if b > a && b >= c && b > mean {
            let curv = a - 2.0 * b + c;
            let delta = if curv < 0.0 {
                (0.5 * (a - c) / curv).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            peaks.push(k as f64 + delta);
        }
    }
    peaks
}

/// Ridge frequency from peak spacing in the oriented signature:
/// `(peaks - 1) / span`. Values outside `[1/25, 1/3]` and blocks with zero
/// coherence are invalid.
pub fn estimate_ridge_frequency(
    image: &Image,
    field: &OrientationField,
    window: usize,
) -> Result<FrequencyMap> {
    if window < 3 {
        return Err(Error::InvalidParameter(format!(
            "frequency window {window} below 3"
        )));
    }
    let (w, h) = image.dims();
    let bs = field.block_size;
    let (cols, rows) = field.grid_dims();
    if cols != w.div_ceil(bs) || rows != h.div_ceil(bs) {
        return Err(Error::InvalidParameter(
            "orientation field does not match image dimensions".into(),
        ));
    }
    let values = (0..cols * rows)
        .into_par_iter()
        .map(|b| {
            let (bx, by) = (b % cols, b / cols);
            if field.coherence(bx, by) == 0.0 {
                return None;
            }
            let x_end = ((bx + 1) * bs).min(w);
            let y_end = ((by + 1) * bs).min(h);
            let cx = (bx * bs + x_end - 1) as f64 / 2.0;
            let cy = (by * bs + y_end - 1) as f64 / 2.0;
            let sig = ridge_signature(image, cx, cy, field.angle(bx, by), window, bs);
            let peaks = signature_peaks(&sig);
            if peaks.len() < 2 {
                return None;
            }
            let span = peaks[peaks.len() - 1] - peaks[0];
            let f = (peaks.len() - 1) as f64 / span;
            (MIN_RIDGE_FREQUENCY..=MAX_RIDGE_FREQUENCY)
                .contains(&f)
                .then_some(f)
        })
        .collect();
    Ok(FrequencyMap {
        block_size: bs,
        cols,
        rows,
        values,
    })
}
