use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;

/// Sampled gaussian of radius `ceil(3 sigma)`, normalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Separable 1-D convolution along rows (`horizontal`) or columns with edge
/// replication. `kernel` has odd length and is centred.
pub(crate) fn convolve_separable(image: &Image, kernel: &[f64], horizontal: bool) -> Image {
    let (w, h) = image.dims();
    let r = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &kw) in kernel.iter().enumerate() {
                let off = k as isize - r;
                acc += kw
                    * if horizontal {
                        image.get_clamped(x as isize + off, y as isize)
                    } else {
                        image.get_clamped(x as isize, y as isize + off)
                    };
            }
            *o = acc;
        }
    });
    Image::from_raw(w, h, out)
}

/// Gaussian smoothing; `sigma` in pixels, 0 is the identity.
pub fn gaussian_blur(image: &Image, sigma: f64) -> Result<Image> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let k = gaussian_kernel(sigma);
    Ok(convolve_separable(
        &convolve_separable(image, &k, true),
        &k,
        false,
    ))
}
