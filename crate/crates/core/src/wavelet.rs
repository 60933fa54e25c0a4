//! Orthonormal 2-D Haar transform.
//!
//! One analysis level applies the pair map `(a, d) = ((x0 + x1)/sqrt2, (x0 - x1)/sqrt2)`
//! along rows, then along columns of both row outputs. Subbands are named by
//! (x-filter, y-filter): `lh` is low along x and high along y (horizontal
//! edges), `hl` high along x and low along y, `hh` diagonal.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::image::Image;

/// Detail subbands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    pub lh: Image,
    pub hl: Image,
    pub hh: Image,
}

impl DetailBands {
    pub fn iter(&self) -> impl Iterator<Item = &Image> {
        [&self.lh, &self.hl, &self.hh].into_iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Image> {
        [&mut self.lh, &mut self.hl, &mut self.hh].into_iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarPyramid {
    /// Coarsest approximation band.
    pub ll: Image,
    /// Detail bands, finest level first.
    pub details: Vec<DetailBands>,
    /// Dimensions the inverse crops back to (pre-padding size).
    pub source_dims: (usize, usize),
}

impl HaarPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Sum of squared coefficients over every band.
    pub fn energy(&self) -> f64 {
        let sq = |img: &Image| img.pixels().iter().map(|c| c * c).sum::<f64>();
        sq(&self.ll)
            + self
                .details
                .iter()
                .flat_map(DetailBands::iter)
                .map(sq)
                .sum::<f64>()
    }
}

fn analyze_pairs(src: &[f64], low: &mut [f64], high: &mut [f64]) {
    for (j, pair) in src.chunks_exact(2).enumerate() {
        low[j] = (pair[0] + pair[1]) * FRAC_1_SQRT_2;
        high[j] = (pair[0] - pair[1]) * FRAC_1_SQRT_2;
    }
}

/// Column-direction analysis of a `w x h` buffer into two `w x h/2` buffers.
fn analyze_columns(src: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let hh = h / 2;
    let mut low = vec![0.0; w * hh];
    let mut high = vec![0.0; w * hh];
    for j in 0..hh {
        let r0 = &src[(2 * j) * w..(2 * j + 1) * w];
        let r1 = &src[(2 * j + 1) * w..(2 * j + 2) * w];
        for x in 0..w {
            low[j * w + x] = (r0[x] + r1[x]) * FRAC_1_SQRT_2;
            high[j * w + x] = (r0[x] - r1[x]) * FRAC_1_SQRT_2;
        }
    }
    (low, high)
}

fn analyze_level(image: &Image) -> (Image, DetailBands) {
    let (w, h) = image.dims();
    let hw = w / 2;
    let mut l = vec![0.0; hw * h];
    let mut hi = vec![0.0; hw * h];
    for y in 0..h {
        analyze_pairs(
            image.row(y),
            &mut l[y * hw..(y + 1) * hw],
            &mut hi[y * hw..(y + 1) * hw],
        );
    }
    let (ll, lh) = analyze_columns(&l, hw, h);
    let (hl, hh) = analyze_columns(&hi, hw, h);
    let band = |v| Image::from_raw(hw, h / 2, v);
    (
        band(ll),
        DetailBands {
            lh: band(lh),
            hl: band(hl),
            hh: band(hh),
        },
    )
}

fn synthesize_level(ll: &Image, d: &DetailBands) -> Image {
    let (hw, hh) = ll.dims();
    let (w, h) = (2 * hw, 2 * hh);
    // undo the column step into row-low / row-high buffers
    let mut l = vec![0.0; hw * h];
    let mut hi = vec![0.0; hw * h];
    for j in 0..hh {
        for x in 0..hw {
            let i = j * hw + x;
            let (a, b) = (ll.pixels()[i], d.lh.pixels()[i]);
            l[2 * j * hw + x] = (a + b) * FRAC_1_SQRT_2;
            l[(2 * j + 1) * hw + x] = (a - b) * FRAC_1_SQRT_2;
            let (a, b) = (d.hl.pixels()[i], d.hh.pixels()[i]);
            hi[2 * j * hw + x] = (a + b) * FRAC_1_SQRT_2;
            hi[(2 * j + 1) * hw + x] = (a - b) * FRAC_1_SQRT_2;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..hw {
            let (a, b) = (l[y * hw + x], hi[y * hw + x]);
            out[y * w + 2 * x] = (a + b) * FRAC_1_SQRT_2;
            out[y * w + 2 * x + 1] = (a - b) * FRAC_1_SQRT_2;
        }
    }
    Image::from_raw(w, h, out)
}

/// Multi-level analysis. Both dimensions must be divisible by `2^levels`;
/// use [`haar_dwt2_padded`] for arbitrary sizes.
pub fn haar_dwt2(image: &Image, levels: usize) -> Result<HaarPyramid> {
    let (w, h) = image.dims();
    if levels >= usize::BITS as usize {
        return Err(Error::IndivisibleDims {
            width: w,
            height: h,
            levels,
        });
    }
    let block = 1usize << levels;
    if w % block != 0 || h % block != 0 {
        return Err(Error::IndivisibleDims {
            width: w,
            height: h,
            levels,
        });
    }
    let mut ll = image.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (next, d) = analyze_level(&ll);
        details.push(d);
        ll = next;
    }
    Ok(HaarPyramid {
        ll,
        details,
        source_dims: (w, h),
    })
}

/// Pads right/bottom edges by replication to a multiple of `2^levels`, then
/// analyzes. The inverse crops the padding away again.
pub fn haar_dwt2_padded(image: &Image, levels: usize) -> Result<HaarPyramid> {
    let block = 1usize << levels.min(30);
    let pw = image.width().div_ceil(block) * block;
    let ph = image.height().div_ceil(block) * block;
    let mut pyr = haar_dwt2(&image.pad_replicate(pw, ph), levels)?;
    pyr.source_dims = image.dims();
    Ok(pyr)
}

/// Exact inverse of [`haar_dwt2`], cropped to `source_dims`.
pub fn haar_idwt2(pyramid: &HaarPyramid) -> Image {
    let mut img = pyramid.ll.clone();
    for d in pyramid.details.iter().rev() {
        img = synthesize_level(&img, d);
    }
    let (w, h) = pyramid.source_dims;
    if img.dims() == (w, h) {
        img
    } else {
        img.crop(w, h)
    }
}

/// Zeroes every detail coefficient with `|c| <= threshold`; others are kept
/// bit-for-bit. The approximation band is untouched.
pub fn hard_threshold_details(pyramid: &mut HaarPyramid, threshold: f64) {
    for band in pyramid.details.iter_mut().flat_map(DetailBands::iter_mut) {
        *band = band.map(|c| if c.abs() <= threshold { 0.0 } else { c });
    }
}
