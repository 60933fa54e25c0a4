use crate::image::{quantize_value, round_half_up, Image};

/// Classic 256-bin equalization:
/// `out = round(255 (cdf(v) - cdf_min) / (N - cdf_min))`, where `cdf_min` is
/// the CDF at the lowest occupied level. Constant images map to 0.
pub fn histogram_equalize(image: &Image) -> Image {
    let levels: Vec<u8> = image.to_bytes();
    let mut hist = [0usize; 256];
    for &l in &levels {
        hist[l as usize] += 1;
    }
    let mut cdf = [0usize; 256];
    let mut acc = 0;
    for (c, &h) in cdf.iter_mut().zip(&hist) {
        acc += h;
        *c = acc;
    }
    let n = levels.len();
    let cdf_min = hist.iter().position(|&h| h > 0).map_or(0, |i| cdf[i]);
    let denom = (n - cdf_min) as f64;
    let map: Vec<f64> = cdf
        .iter()
        .map(|&c| {
            if denom == 0.0 {
                0.0
            } else {
                round_half_up(255.0 * c.saturating_sub(cdf_min) as f64 / denom)
            }
        })
        .collect();
    image.map(|p| map[quantize_value(p) as usize])
}
