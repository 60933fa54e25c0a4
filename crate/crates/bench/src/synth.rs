//! Oriented-sinusoid ridge fixtures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ridgelab::Image;

use crate::error::BenchError;

/// `WxH:period:degrees`, e.g. `256x256:8:45`. `degrees` is the ridge
/// direction measured from the x-axis with y pointing down, so `90` gives
/// vertical ridges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub period: f64,
    pub degrees: f64,
}

impl SynthSpec {
    /// `128 + 100 sin(2 pi (x cos phi + y sin phi) / period)` with
    /// `phi = degrees - 90`, the direction across the ridges.
    pub fn generate(&self) -> Image {
        let phi = (self.degrees - 90.0).to_radians();
        let (s, c) = phi.sin_cos();
        let k = 2.0 * PI / self.period;
        Image::from_fn(self.width, self.height, |x, y| {
            128.0 + 100.0 * (k * (x as f64 * c + y as f64 * s)).sin()
        })
        .expect("validated synth dimensions")
    }
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}:{}:{}",
            self.width, self.height, self.period, self.degrees
        )
    }
}

impl FromStr for SynthSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        let bad = |why: &str| BenchError::Synth(format!("`{s}`: {why}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [dims, period, degrees] = parts[..] else {
            return Err(bad("expected WxH:period:degrees"));
        };
        let (w, h) = dims
            .split_once(['x', 'X'])
            .ok_or_else(|| bad("dimensions must be WxH"))?;
        let width: usize = w.parse().map_err(|_| bad("bad width"))?;
        let height: usize = h.parse().map_err(|_| bad("bad height"))?;
        let period: f64 = period.parse().map_err(|_| bad("bad period"))?;
        let degrees: f64 = degrees.parse().map_err(|_| bad("bad angle"))?;
        if width == 0 || height == 0 {
            return Err(bad("dimensions must be positive"));
        }
        if !(period > 0.0 && period.is_finite()) || !degrees.is_finite() {
            return Err(bad("period must be positive and angle finite"));
        }
        Ok(Self {
            width,
            height,
            period,
            degrees,
        })
    }
}
