use std::fmt;

use crate::error::{Error, Result};
use crate::image::{normalize_clip, Image};
use crate::metrics::estimate_noise_sigma;
use crate::wavelet::{haar_dwt2_padded, haar_idwt2, hard_threshold_details};

/// Haar decomposition depth used by [`visu_shrink`].
pub const VISU_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaChoice {
    Fixed(f64),
    /// Robust wavelet estimate from the input itself.
    Auto,
}

impl fmt::Display for SigmaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaChoice::Fixed(s) => write!(f, "{s}"),
            SigmaChoice::Auto => f.write_str("auto"),
        }
    }
}

/// Universal threshold `sigma * sqrt(2 ln N)`.
pub fn universal_threshold(sigma: f64, n: usize) -> f64 {
    sigma * (2.0 * (n as f64).ln()).sqrt()
}

/// Hard-threshold wavelet shrinkage over a 3-level Haar pyramid; the
/// approximation band is left alone. Output is clipped to `[0, 255]`.
pub fn visu_shrink(image: &Image, sigma: SigmaChoice) -> Result<Image> {
    let sigma = match sigma {
        SigmaChoice::Fixed(s) if s < 0.0 || !s.is_finite() => return Err(Error::NegativeSigma(s)),
        SigmaChoice::Fixed(s) => s,
        SigmaChoice::Auto => estimate_noise_sigma(image)?,
    };
    let t = universal_threshold(sigma, image.len());
    let mut pyr = haar_dwt2_padded(image, VISU_LEVELS)?;
    hard_threshold_details(&mut pyr, t);
    normalize_clip(&haar_idwt2(&pyr), 0.0, 255.0, false)
}
