//! Orientation- and frequency-tuned Gabor ridge enhancement.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;

use super::orientation::{estimate_orientation, estimate_ridge_frequency};

/// Largest kernel half-width; kernels never exceed 49x49.
const MAX_KERNEL_RADIUS: usize = 24;
/// Responses spanning less than this are treated as flat.
const FLAT_RESPONSE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaborConfig {
    /// Envelope width across the ridges, in ridge periods.
    pub kx: f64,
    /// Envelope width along the ridges, in ridge periods.
    pub ky: f64,
    pub orientation_block: usize,
    pub freq_window: usize,
    /// Used for blocks with no valid frequency estimate (cycles/pixel).
    pub fallback_frequency: f64,
    /// Snap orientations onto this many directions when set.
    pub orientation_bins: Option<usize>,
}

impl Default for GaborConfig {
    fn default() -> Self {
        Self {
            kx: 0.5,
            ky: 0.5,
            orientation_block: 16,
            freq_window: 32,
            fallback_frequency: 0.1,
            orientation_bins: None,
        }
    }
}

impl GaborConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.kx) || !positive(self.ky) || !positive(self.fallback_frequency) {
            return Err(Error::InvalidParameter(
                "gabor bandwidths and fallback frequency must be positive".into(),
            ));
        }
        if self.orientation_block == 0 || self.freq_window == 0 || self.orientation_bins == Some(0)
        {
            return Err(Error::InvalidParameter(
                "gabor block sizes must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Square zero-DC Gabor kernel, row-major over offsets `-radius..=radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborKernel {
    pub radius: usize,
    pub weights: Vec<f64>,
}

impl GaborKernel {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
}

/// Even-symmetric kernel `cos(2 pi f x_t) exp(-(x_t^2/sx^2 + y_t^2/sy^2)/2)`
/// with `x_t` across the ridges (perpendicular to `theta`), `y_t` along them,
/// `sx = kx / f`, `sy = ky / f`. The kernel mean is subtracted.
pub fn gabor_kernel(theta: f64, frequency: f64, kx: f64, ky: f64) -> GaborKernel {
    let sx = kx / frequency;
    let sy = ky / frequency;
    let radius = ((3.0 * sx.max(sy)).ceil() as usize).min(MAX_KERNEL_RADIUS);
    let r = radius as isize;
    let (s, c) = theta.sin_cos();
    let mut weights = Vec::with_capacity((2 * radius + 1).pow(2));
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (dx as f64, dy as f64);
            let across = -x * s + y * c;
            let along = x * c + y * s;
            let env = (-0.5 * (across * across / (sx * sx) + along * along / (sy * sy))).exp();
            weights.push((2.0 * PI * frequency * across).cos() * env);
        }
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    weights.iter_mut().for_each(|w| *w -= mean);
    GaborKernel { radius, weights }
}

fn standardize(image: &Image) -> Option<Image> {
    let mean = image.mean();
    let var = image
        .pixels()
        .iter()
        .map(|p| (p - mean).powi(2))
        .sum::<f64>()
        / image.len() as f64;
    (var > 0.0).then(|| {
        let sd = var.sqrt();
        image.map(|p| (p - mean) / sd)
    })
}

/// Ridge enhancement: standardize, estimate per-block orientation and
/// frequency, convolve every pixel with its block's Gabor kernel, then
/// min-max stretch onto `[0, 255]`. Flat responses become constant 128.
pub fn gabor_enhance(image: &Image, config: &GaborConfig) -> Result<Image> {
    config.validate()?;
    let (w, h) = image.dims();
    let flat = || Image::filled(w, h, 128.0);
    let Some(norm) = standardize(image) else {
        return flat();
    };

    let mut field = estimate_orientation(&norm, config.orientation_block)?;
    if let Some(bins) = config.orientation_bins {
        field = field.quantized(bins);
    }
    let freqs = estimate_ridge_frequency(&norm, &field, config.freq_window)?;
    let (cols, rows) = field.grid_dims();
    let kernels: Vec<GaborKernel> = (0..cols * rows)
        .into_par_iter()
        .map(|b| {
            let (bx, by) = (b % cols, b / cols);
            let f = freqs.get(bx, by).unwrap_or(config.fallback_frequency);
            gabor_kernel(field.angle(bx, by), f, config.kx, config.ky)
        })
        .collect();

    let pad = kernels.iter().map(|k| k.radius).max().unwrap_or(0);
    let pw = w + 2 * pad;
    let padded: Vec<f64> = (0..h + 2 * pad)
        .flat_map(|y| {
            let norm = &norm;
            (0..pw).map(move |x| {
                norm.get_clamped(x as isize - pad as isize, y as isize - pad as isize)
            })
        })
        .collect();

    let bs = config.orientation_block;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let k = &kernels[(y / bs) * cols + x / bs];
            let side = k.side();
            let (ox, oy) = (x + pad - k.radius, y + pad - k.radius);
            let mut acc = 0.0;
            for (ky, krow) in k.weights.chunks_exact(side).enumerate() {
                let src = &padded[(oy + ky) * pw + ox..(oy + ky) * pw + ox + side];
                acc += krow.iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
            }
            *o = acc;
        }
    });

    let response = Image::from_raw(w, h, out);
    let (lo, hi) = response.min_max();
    if hi - lo < FLAT_RESPONSE {
        return flat();
    }
    let scale = 255.0 / (hi - lo);
    Ok(response.map(|p| (p - lo) * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mse;
    use crate::noise::add_gaussian;

    fn ridges(size: usize, period: f64, deg: f64) -> Image {
        let phi = (deg - 90.0).to_radians();
        Image::from_fn(size, size, |x, y| {
            128.0
                + 100.0 * (2.0 * PI * (x as f64 * phi.cos() + y as f64 * phi.sin()) / period).sin()
        })
        .unwrap()
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    fn interior(img: &Image, margin: usize) -> Vec<f64> {
        let (w, h) = img.dims();
        (margin..h - margin)
            .flat_map(|y| (margin..w - margin).map(move |x| (x, y)))
            .map(|(x, y)| img.get(x, y))
            .collect()
    }

    /// Least-squares gain/offset fit of `test` onto `reference`.
    fn affine_match(reference: &Image, test: &Image) -> Image {
        let (mt, mr) = (test.mean(), reference.mean());
        let cov: f64 = test
            .pixels()
            .iter()
            .zip(reference.pixels())
            .map(|(t, r)| (t - mt) * (r - mr))
            .sum();
        let var: f64 = test.pixels().iter().map(|t| (t - mt).powi(2)).sum();
        let gain = cov / var;
        test.map(|t| mr + gain * (t - mt))
    }

    #[test]
    fn kernel_has_zero_dc() {
        for (theta, f) in [
            (0.0, 0.1),
            (1.0, 0.125),
            (2.5, 1.0 / 25.0),
            (0.3, 1.0 / 3.0),
        ] {
            let k = gabor_kernel(theta, f, 0.5, 0.5);
            assert!(k.weights.iter().sum::<f64>().abs() <= 1e-9);
            assert!(k.side() <= 49);
        }
    }

    #[test]
    fn constant_maps_to_128() {
        let out = gabor_enhance(
            &Image::filled(30, 20, 77.0).unwrap(),
            &GaborConfig::default(),
        )
        .unwrap();
        assert!(out.pixels().iter().all(|&p| p == 128.0));
    }

    #[test]
    fn preserves_clean_ridges() {
        let img = ridges(128, 8.0, 90.0);
        let out = gabor_enhance(&img, &GaborConfig::default()).unwrap();
        let r = pearson(&interior(&img, 16), &interior(&out, 16));
        assert!(r >= 0.9, "pearson {r}");
    }

    #[test]
    fn suppresses_noise_after_affine_match() {
        let clean = ridges(128, 8.0, 90.0);
        let noisy = add_gaussian(&clean, 25.0, 3).unwrap();
        let out = gabor_enhance(&noisy, &GaborConfig::default()).unwrap();
        let matched = affine_match(&clean, &out);
        assert!(mse(&clean, &matched).unwrap() < mse(&clean, &noisy).unwrap());
    }

    #[test]
    fn quantized_orientations_still_enhance() {
        let img = ridges(96, 8.0, 30.0);
        let cfg = GaborConfig {
            orientation_bins: Some(16),
            ..Default::default()
        };
        let out = gabor_enhance(&img, &cfg).unwrap();
        assert!(pearson(&interior(&img, 16), &interior(&out, 16)) >= 0.9);
    }

    #[test]
    fn invalid_config() {
        let cfg = GaborConfig {
            kx: 0.0,
            ..Default::default()
        };
        assert!(gabor_enhance(&Image::filled(4, 4, 1.0).unwrap(), &cfg).is_err());
    }
}
