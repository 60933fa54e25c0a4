//! Seeded noise injectors.
//!
//! Every injector draws from xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Uniform variates take the top 53
//! bits of each output: `u = (x >> 11) * 2^-53`, so `u` lies in `[0, 1)`.
//!
//! Normal variates use Box-Muller on consecutive uniform pairs `(u1, u2)`:
//! `r = sqrt(-2 ln(1 - u1))`, `z0 = r cos(2 pi u2)`, `z1 = r sin(2 pi u2)`.
//! Pixel `2k` receives `z0` and pixel `2k + 1` receives `z1`; an odd
//! trailing pixel discards its `z1`.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::error::{Error, Result};
use crate::image::Image;

struct NoiseRng(Xoshiro256StarStar);

impl NoiseRng {
    fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// `n` standard normals in the documented consumption order.
    fn normals(&mut self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        while out.len() < n {
            let (a, b) = self.normal_pair();
            out.push(a);
            out.push(b);
        }
        out.truncate(n);
        out
    }
}

/// Additive white gaussian noise, clipped to `[0, 255]`.
pub fn add_gaussian(image: &Image, sigma: f64, seed: u64) -> Result<Image> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let z = NoiseRng::new(seed).normals(image.len());
    let px = image
        .pixels()
        .iter()
        .zip(z)
        .map(|(&p, z)| (p + sigma * z).clamp(0.0, 255.0))
        .collect();
    Ok(Image::from_raw(image.width(), image.height(), px))
}

/// Multiplicative noise `p * (1 + sqrt(variance) * z)`, clipped to `[0, 255]`.
pub fn add_speckle(image: &Image, variance: f64, seed: u64) -> Result<Image> {
    if variance < 0.0 || !variance.is_finite() {
        return Err(Error::NegativeVariance(variance));
    }
    if variance == 0.0 {
        return Ok(image.clone());
    }
    let sd = variance.sqrt();
    let z = NoiseRng::new(seed).normals(image.len());
    let px = image
        .pixels()
        .iter()
        .zip(z)
        .map(|(&p, z)| (p * (1.0 + sd * z)).clamp(0.0, 255.0))
        .collect();
    Ok(Image::from_raw(image.width(), image.height(), px))
}

/// Impulse noise. Per pixel one uniform `u` decides corruption (`u < density`);
/// a corrupted pixel draws a second uniform `v` and becomes 0 if `v < 0.5`,
/// else 255.
pub fn add_salt_pepper(image: &Image, density: f64, seed: u64) -> Result<Image> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::DensityOutOfRange(density));
    }
    if density == 0.0 {
        return Ok(image.clone());
    }
    let mut rng = NoiseRng::new(seed);
    let px = image
        .pixels()
        .iter()
        .map(|&p| {
            if rng.uniform() < density {
                if rng.uniform() < 0.5 {
                    0.0
                } else {
                    255.0
                }
            } else {
                p
            }
        })
        .collect();
    Ok(Image::from_raw(image.width(), image.height(), px))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Gaussian,
    Speckle,
    SaltPepper,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Speckle => "speckle",
            NoiseKind::SaltPepper => "sp",
        }
    }
}

/// A noise model with its parameter and seed; textual form `kind:param:seed`,
/// e.g. `sp:0.05:42`, `gaussian:15:7`, `speckle:0.04:1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// sigma for gaussian, multiplier variance for speckle, density for salt-and-pepper
    pub param: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, param: f64, seed: u64) -> Result<Self> {
        let spec = Self { kind, param, seed };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let p = self.param;
        match self.kind {
            NoiseKind::Gaussian if !(p >= 0.0 && p.is_finite()) => Err(Error::NegativeSigma(p)),
            NoiseKind::Speckle if !(p >= 0.0 && p.is_finite()) => Err(Error::NegativeVariance(p)),
            NoiseKind::SaltPepper if !(0.0..=1.0).contains(&p) => Err(Error::DensityOutOfRange(p)),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, image: &Image) -> Result<Image> {
        match self.kind {
            NoiseKind::Gaussian => add_gaussian(image, self.param, self.seed),
            NoiseKind::Speckle => add_speckle(image, self.param, self.seed),
            NoiseKind::SaltPepper => add_salt_pepper(image, self.param, self.seed),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind.as_str(), self.param, self.seed)
    }
}

impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [kind, param, seed] = parts[..] else {
            return Err(Error::parse(s, "expected kind:param:seed"));
        };
        let kind = match kind.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" | "g" => NoiseKind::Gaussian,
            "speckle" => NoiseKind::Speckle,
            "sp" | "salt_pepper" | "saltpepper" => NoiseKind::SaltPepper,
            other => return Err(Error::parse(s, format!("unknown noise kind `{other}`"))),
        };
        let param: f64 = param
            .parse()
            .map_err(|_| Error::parse(s, format!("bad parameter `{param}`")))?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::parse(s, format!("bad seed `{seed}`")))?;
        Self::new(kind, param, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(v: f64) -> Image {
        Image::filled(256, 256, v).unwrap()
    }

    fn std_dev(xs: impl Iterator<Item = f64> + Clone) -> f64 {
        let n = xs.clone().count() as f64;
        let mean = xs.clone().sum::<f64>() / n;
        (xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }

    #[test]
    fn zero_strength_is_identity() {
        // out-of-range values survive untouched: no clipping on the identity path
        let img = Image::new(3, 1, vec![-4.0, 12.25, 300.0]).unwrap();
        assert_eq!(add_gaussian(&img, 0.0, 1).unwrap(), img);
        assert_eq!(add_speckle(&img, 0.0, 1).unwrap(), img);
        assert_eq!(add_salt_pepper(&img, 0.0, 1).unwrap(), img);
    }

    #[test]
    fn gaussian_sample_std() {
        let clean = flat(128.0);
        let noisy = add_gaussian(&clean, 15.0, 7).unwrap();
        let sd = std_dev(noisy.pixels().iter().map(|p| p - 128.0));
        assert!((sd - 15.0).abs() < 0.5, "sd = {sd}");
    }

    #[test]
    fn determinism() {
        let clean = flat(128.0);
        assert_eq!(
            add_gaussian(&clean, 15.0, 9).unwrap(),
            add_gaussian(&clean, 15.0, 9).unwrap()
        );
        assert_ne!(
            add_gaussian(&clean, 15.0, 9).unwrap(),
            add_gaussian(&clean, 15.0, 10).unwrap()
        );
        assert_eq!(
            add_salt_pepper(&clean, 0.3, 9).unwrap(),
            add_salt_pepper(&clean, 0.3, 9).unwrap()
        );
    }

    #[test]
    fn speckle_examples() {
        let zero = flat(0.0);
        assert_eq!(add_speckle(&zero, 0.5, 3).unwrap(), zero);
        let noisy = add_speckle(&flat(100.0), 0.04, 3).unwrap();
        let sd = std_dev(noisy.pixels().iter().copied());
        assert!((sd - 20.0).abs() < 1.0, "sd = {sd}");
    }

    #[test]
    fn salt_pepper_examples() {
        let clean = flat(128.0);
        let full = add_salt_pepper(&clean, 1.0, 5).unwrap();
        assert!(full.pixels().iter().all(|&p| p == 0.0 || p == 255.0));
        let noisy = add_salt_pepper(&clean, 0.05, 42).unwrap();
        let hit = noisy.pixels().iter().filter(|&&p| p != 128.0).count() as i64;
        assert!((hit - 3277).abs() <= 200, "corrupted = {hit}");
        let salt = noisy.pixels().iter().filter(|&&p| p == 255.0).count() as i64;
        assert!((salt - hit / 2).abs() < 150);
    }

    #[test]
    fn validation() {
        let img = flat(1.0);
        assert!(matches!(
            add_gaussian(&img, -1.0, 0),
            Err(Error::NegativeSigma(_))
        ));
        assert!(matches!(
            add_speckle(&img, -0.1, 0),
            Err(Error::NegativeVariance(_))
        ));
        assert!(matches!(
            add_salt_pepper(&img, 1.5, 0),
            Err(Error::DensityOutOfRange(_))
        ));
    }

    #[test]
    fn spec_text_form() {
        let s: NoiseSpec = "sp:0.05:42".parse().unwrap();
        assert_eq!(s, NoiseSpec::new(NoiseKind::SaltPepper, 0.05, 42).unwrap());
        assert_eq!(s.to_string(), "sp:0.05:42");
        assert_eq!(
            "gaussian:15:7".parse::<NoiseSpec>().unwrap().to_string(),
            "gaussian:15:7"
        );
        assert!(matches!(
            "sp:1.5:1".parse::<NoiseSpec>(),
            Err(Error::DensityOutOfRange(_))
        ));
        assert!("blur:1:1".parse::<NoiseSpec>().is_err());
        assert!("sp:0.1".parse::<NoiseSpec>().is_err());
    }

    #[test]
    fn odd_pixel_count_uses_documented_order() {
        let even = add_gaussian(&Image::filled(4, 1, 100.0).unwrap(), 10.0, 11).unwrap();
        let odd = add_gaussian(&Image::filled(3, 1, 100.0).unwrap(), 10.0, 11).unwrap();
        assert_eq!(&even.pixels()[..3], odd.pixels());
    }
}
