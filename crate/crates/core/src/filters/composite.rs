use crate::error::Result;
use crate::image::{normalize_clip, Image};
use crate::metrics::estimate_noise_sigma;
use crate::wavelet::{haar_dwt2_padded, haar_idwt2, hard_threshold_details};

use super::gabor::{gabor_enhance, GaborConfig};
use super::visu::universal_threshold;

/// One-level Haar composite: Gabor enhancement of the approximation band
/// and universal hard thresholding of the detail bands.
///
/// At one level the approximation band is twice the local 2x2 mean, so it is
/// halved into intensity range before enhancement and doubled afterwards.
pub fn wavelet_gabor_composite(image: &Image, config: &GaborConfig) -> Result<Image> {
    config.validate()?;
    let sigma = estimate_noise_sigma(image).unwrap_or(0.0);
    let t = universal_threshold(sigma, image.len());
    let mut pyr = haar_dwt2_padded(image, 1)?;
    let enhanced = gabor_enhance(&pyr.ll.map(|c| c / 2.0), config)?;
    pyr.ll = enhanced.map(|c| c * 2.0);
    hard_threshold_details(&mut pyr, t);
    normalize_clip(&haar_idwt2(&pyr), 0.0, 255.0, false)
}
