//! PGM (P2/P5) and PNG input, binary PGM output.

use std::fs;
use std::io::{BufWriter, Cursor, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{round_half_up, to_grayscale, Image, RgbImage};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a grayscale image from a P2/P5 PGM or an 8-bit gray/RGB PNG.
/// The result is always quantized.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    decode_image(&bytes)
}

/// Format sniffing by magic number.
pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        decode_pgm(bytes)
    } else {
        let magic: String = bytes.iter().take(2).map(|&b| b as char).collect();
        Err(Error::UnsupportedFormat(format!("magic {magic:?}")))
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let tok = self
            .token()
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| {
                Error::MalformedHeader(format!(
                    "{what} `{}` is not a non-negative integer",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let binary = &bytes[..2] == b"P5";
    let mut rd = HeaderReader { bytes, pos: 2 };
    let width = rd.number("width")? as usize;
    let height = rd.number("height")? as usize;
    let maxval = rd.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "non-positive dimensions {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedHeader(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;

    let samples: Vec<u64> = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        let start = rd.pos + 1;
        let bps = if maxval < 256 { 1 } else { 2 };
        let raster = bytes.get(start..).unwrap_or(&[]);
        let found = raster.len() / bps;
        if found < count {
            return Err(Error::TruncatedData {
                expected: count,
                found,
            });
        }
        if bps == 1 {
            raster[..count].iter().map(|&b| u64::from(b)).collect()
        } else {
            raster[..2 * count]
                .chunks_exact(2)
                .map(|c| u64::from(u16::from_be_bytes([c[0], c[1]])))
                .collect()
        }
    } else {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let tok = rd.token().ok_or(Error::TruncatedData {
                expected: count,
                found: out.len(),
            })?;
            let v = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| {
                    Error::MalformedHeader(format!(
                        "bad ASCII sample `{}`",
                        String::from_utf8_lossy(tok)
                    ))
                })?;
            out.push(v);
        }
        out
    };

    if let Some(&bad) = samples.iter().find(|&&s| s > maxval) {
        return Err(Error::MalformedHeader(format!(
            "sample {bad} exceeds maxval {maxval}"
        )));
    }
    let pixels = if maxval == 255 {
        samples.into_iter().map(|s| s as f64).collect()
    } else {
        let m = maxval as f64;
        samples
            .into_iter()
            .map(|s| round_half_up(s as f64 * 255.0 / m))
            .collect()
    };
    Image::new(width, height, pixels)
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::UnsupportedFormat(format!("png: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::UnsupportedFormat("png: image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::UnsupportedFormat(format!("png: {e}")))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "png bit depth {:?}, only 8-bit is supported",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let stride = info.line_size;
    match info.color_type {
        png::ColorType::Grayscale => {
            let mut px = Vec::with_capacity(w * h);
            for row in buf.chunks(stride).take(h) {
                px.extend_from_slice(&row[..w]);
            }
            Image::from_bytes(w, h, &px)
        }
        png::ColorType::Rgb => {
            let mut px = Vec::with_capacity(3 * w * h);
            for row in buf.chunks(stride).take(h) {
                px.extend_from_slice(&row[..3 * w]);
            }
            Ok(to_grayscale(&RgbImage::from_interleaved(w, h, &px)?))
        }
        other => Err(Error::UnsupportedFormat(format!(
            "png color type {other:?}"
        ))),
    }
}

/// Serializes as binary P5 with maxval 255 (half-up rounding, then clip).
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(image.to_bytes());
    out
}

pub fn save_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_pgm(image))?;
    w.flush()?;
    Ok(())
}

/// Writes an 8-bit grayscale PNG. Used for fixtures and previews.
pub fn save_png(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut enc = png::Encoder::new(
        BufWriter::new(file),
        image.width() as u32,
        image.height() as u32,
    );
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc
        .write_header()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writer
        .write_image_data(&image.to_bytes())
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_bytes_map_directly() {
        let mut f = b"P5\n2 2\n255\n".to_vec();
        f.extend([0, 128, 255, 7]);
        let img = decode_image(&f).unwrap();
        assert_eq!(img.dims(), (2, 2));
        assert_eq!(img.pixels(), &[0.0, 128.0, 255.0, 7.0]);
    }

    #[test]
    fn p2_single_pixel() {
        let img = decode_image(b"P2\n1 1\n255\n42").unwrap();
        assert_eq!(img.pixels(), &[42.0]);
    }

    #[test]
    fn p2_with_comments_and_multiple_samples() {
        let img = decode_image(b"P2\n# made by hand\n3 1 # width height\n255\n1 2\n 3\n").unwrap();
        assert_eq!(img.pixels(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn maxval_rescale() {
        let mut f = b"P5 1 2 15\n".to_vec();
        f.extend([15, 7]);
        let img = decode_image(&f).unwrap();
        // round(15*255/15) = 255, round(7*17) = 119
        assert_eq!(img.pixels(), &[255.0, 119.0]);
    }

    #[test]
    fn sixteen_bit_samples() {
        let mut f = b"P5 1 1 65535\n".to_vec();
        f.extend(65535u16.to_be_bytes());
        assert_eq!(decode_image(&f).unwrap().pixels(), &[255.0]);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            decode_image(b"P6\n1 1\n255\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode_image(b"P5\n0 1\n255\n"),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_image(b"P5\n1 1\n70000\n\0"),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_image(b"P5\n-1 1\n255\n"),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_image(b"P5\n2 2\n255\n\x01"),
            Err(Error::TruncatedData { .. })
        ));
        assert!(matches!(
            decode_image(b"P2\n2 1\n255\n1"),
            Err(Error::TruncatedData { .. })
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_image("/definitely/not/here.pgm"),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn encode_examples() {
        let one = |v: f64| Image::new(1, 1, vec![v]).unwrap();
        let mut expected = b"P5\n1 1\n255\n".to_vec();
        expected.push(0x2A);
        assert_eq!(encode_pgm(&one(42.0)), expected);
        assert_eq!(*encode_pgm(&one(-3.0)).last().unwrap(), 0);
        assert_eq!(*encode_pgm(&one(41.5)).last().unwrap(), 42);
    }

    #[test]
    fn png_gray_and_rgb() {
        let dir = tempfile::tempdir().unwrap();
        let gray = Image::from_fn(5, 3, |x, y| (x * 40 + y) as f64).unwrap();
        let p = dir.path().join("g.png");
        save_png(&gray, &p).unwrap();
        assert_eq!(load_image(&p).unwrap(), gray);

        let p = dir.path().join("rgb.png");
        let file = fs::File::create(&p).unwrap();
        let mut enc = png::Encoder::new(file, 2, 1);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[0, 0, 255, 10, 10, 10]).unwrap();
        w.finish().unwrap();
        assert_eq!(load_image(&p).unwrap().pixels(), &[29.0, 10.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantized_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
                let mut s = seed;
                let img = Image::from_fn(w, h, |_, _| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (s >> 56) as f64
                }).unwrap();
                prop_assert_eq!(decode_image(&encode_pgm(&img)).unwrap(), img);
            }

            #[test]
            fn round_trip_equals_quantize(px in proptest::collection::vec(-20.0f64..280.0, 12)) {
                let img = Image::new(4, 3, px).unwrap();
                prop_assert_eq!(decode_image(&encode_pgm(&img)).unwrap(), img.quantize());
            }
        }
    }
}
