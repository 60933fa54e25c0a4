//! Full-reference quality metrics (MSE, SNR, PSNR) and a no-reference
//! noise level estimate.
//!
//! Unbounded decibel values are represented by `f64::INFINITY` /
//! `f64::NEG_INFINITY` in memory and by the strings `"inf"` / `"-inf"` in
//! serialized reports.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::wavelet::haar_dwt2_padded;

const PEAK: f64 = 255.0;
/// Median absolute deviation of a standard normal.
const MAD_NORMAL: f64 = 0.6745;

/// Mean of squared differences.
pub fn mse(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    Ok(residual_energy(reference, test) / reference.len() as f64)
}

fn residual_energy(reference: &Image, test: &Image) -> f64 {
    reference
        .pixels()
        .iter()
        .zip(test.pixels())
        .map(|(r, t)| (r - t) * (r - t))
        .sum()
}

/// `10 log10(sum ref^2 / sum (ref - test)^2)`. Zero residual gives `+inf`;
/// zero signal with a nonzero residual gives `-inf`.
pub fn snr_db(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    let noise = residual_energy(reference, test);
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    let signal: f64 = reference.pixels().iter().map(|r| r * r).sum();
    if signal == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// `10 log10(255^2 / mse)`; `+inf` for identical images.
pub fn psnr_db(reference: &Image, test: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(reference, test)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

/// Robust noise sigma: `median(|HH|) / 0.6745` over the finest diagonal Haar
/// subband. Odd dimensions are edge-padded to even first.
pub fn estimate_noise_sigma(image: &Image) -> Result<f64> {
    let (width, height) = image.dims();
    if width < 2 || height < 2 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: 2,
        });
    }
    let pyr = haar_dwt2_padded(image, 1)?;
    let mut mags: Vec<f64> = pyr.details[0].hh.pixels().iter().map(|c| c.abs()).collect();
    Ok(median_in_place(&mut mags) / MAD_NORMAL)
}

/// Median with even counts resolved as the mean of the two central values.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (lower, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if n % 2 == 1 {
        m
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (below + m) / 2.0
    }
}

/// Quality figures for one image, optionally against a clean reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    pub snr_db: f64,
    pub psnr_db: f64,
    pub sigma_hat: Option<f64>,
}

impl MetricsReport {
    /// Full-reference report; `sigma_hat` is estimated on `test` when it is
    /// at least 2x2.
    pub fn compare(reference: &Image, test: &Image) -> Result<Self> {
        let mse = mse(reference, test)?;
        Ok(Self {
            mse,
            snr_db: snr_db(reference, test)?,
            psnr_db: psnr_from_mse(mse),
            sigma_hat: estimate_noise_sigma(test).ok(),
        })
    }

    /// Column values in report order: mse, snr_db, psnr_db, sigma_hat.
    pub fn csv_fields(&self) -> [String; 4] {
        [
            format_metric(self.mse),
            format_metric(self.snr_db),
            format_metric(self.psnr_db),
            self.sigma_hat.map(format_metric).unwrap_or_default(),
        ]
    }
}

/// Text form used in reports: shortest round-trip decimal, or `inf`/`-inf`.
pub fn format_metric(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// Inverse of [`format_metric`].
pub fn parse_metric(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Serde adapter writing infinities as `"inf"` / `"-inf"` strings.
pub struct MetricValue(pub f64);

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str(&format_metric(self.0))
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// JSON object with keys `mse`, `snr_db`, `psnr_db`, `sigma_hat`.
impl Serialize for MetricsReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MetricsReport", 4)?;
        st.serialize_field("mse", &MetricValue(self.mse))?;
        st.serialize_field("snr_db", &MetricValue(self.snr_db))?;
        st.serialize_field("psnr_db", &MetricValue(self.psnr_db))?;
        st.serialize_field("sigma_hat", &self.sigma_hat.map(MetricValue))?;
        st.end()
    }
}
