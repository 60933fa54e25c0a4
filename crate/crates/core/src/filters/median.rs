use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::metrics::median_in_place;

/// Median over the `(2r+1)^2` window with edge replication.
pub fn median_filter(image: &Image, radius: usize) -> Result<Image> {
    if radius == 0 {
        return Err(Error::InvalidParameter(
            "median radius must be at least 1".into(),
        ));
    }
    let (w, h) = image.dims();
    let r = radius as isize;
    let side = 2 * radius + 1;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each_init(
        || Vec::with_capacity(side * side),
        |win, (y, row)| {
            for (x, o) in row.iter_mut().enumerate() {
                win.clear();
                for dy in -r..=r {
                    for dx in -r..=r {
                        win.push(image.get_clamped(x as isize + dx, y as isize + dy));
                    }
                }
                *o = median_in_place(win);
            }
        },
    );
    Ok(Image::from_raw(w, h, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_impulse() {
        let img = Image::filled(7, 7, 31.0).unwrap();
        assert_eq!(median_filter(&img, 2).unwrap(), img);
        let mut px = vec![31.0; 49];
        px[24] = 255.0;
        let out = median_filter(&Image::new(7, 7, px).unwrap(), 1).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn one_dimensional_row() {
        let img = Image::new(5, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        // replicated rows: window at index 2 is {2,3,4} three times
        assert_eq!(median_filter(&img, 1).unwrap().get(2, 0), 3.0);
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(median_filter(&Image::filled(2, 2, 0.0).unwrap(), 0).is_err());
    }

    #[test]
    fn commutes_with_flips() {
        let img = Image::from_fn(9, 6, |x, y| ((x * 37 + y * 101) % 256) as f64).unwrap();
        let m = median_filter(&img, 1).unwrap();
        assert_eq!(median_filter(&img.hflip(), 1).unwrap(), m.hflip());
        assert_eq!(median_filter(&img.vflip(), 1).unwrap(), m.vflip());
    }
}
