//! RGB rasters, single-channel planes and colour-space conversion.

use thiserror::Error;

use crate::scalar::Real;

/// An 8-bit RGB pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    /// Grey pixel with all three channels equal.
    pub const fn grey(v: u8) -> Self {
        Self { r: v, g: v, b: v }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RasterError {
    #[error("raster dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {got} values but {width}x{height} needs {need}")]
    LengthMismatch {
        width: usize,
        height: usize,
        got: usize,
        need: usize,
    },
}

/// A row-major grid of RGB pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        let need = width * height;
        if pixels.len() != need {
            return Err(RasterError::LengthMismatch {
                width,
                height,
                got: pixels.len(),
                need,
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Constant-colour raster.
    pub fn filled(width: usize, height: usize, colour: Rgb) -> Result<Self, RasterError> {
        Self::new(width, height, vec![colour; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, p: Rgb) {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x] = p;
    }

    /// Extracts one channel as an 8-bit plane. H, S and V are quantized to
    /// `round(h/360*255)`, `round(s*255)` and `round(v*255)` so one octil and
    /// morphology engine serves all six channels.
    pub fn channel_plane(&self, channel: Channel) -> Plane {
        let values = self
            .pixels
            .iter()
            .map(|p| match channel {
                Channel::R => p.r,
                Channel::G => p.g,
                Channel::B => p.b,
                Channel::H | Channel::S | Channel::V => {
                    let hsv: HsvTriple<f64> = rgb_to_hsv(p.r, p.g, p.b);
                    let unit = match channel {
                        Channel::H => hsv.h / 360.0,
                        Channel::S => hsv.s,
                        _ => hsv.v,
                    };
                    (unit * 255.0).round() as u8
                }
            })
            .collect();
        Plane {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// A row-major grid of 8-bit intensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl Plane {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        let need = width * height;
        if values.len() != need {
            return Err(RasterError::LengthMismatch {
                width,
                height,
                got: values.len(),
                need,
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, v: u8) -> Result<Self, RasterError> {
        Self::new(width, height, vec![v; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.values[y * self.width + x] = v;
    }

    /// Read with edge replication: out-of-range coordinates clamp to the border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.values[y * self.width + x]
    }
}

/// The six analysis channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
    H,
    S,
    V,
}

impl Channel {
    /// Canonical channel order used by the colour feature block.
    pub const ALL: [Channel; 6] = [
        Channel::R,
        Channel::G,
        Channel::B,
        Channel::H,
        Channel::S,
        Channel::V,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Channel::R => "r",
            Channel::G => "g",
            Channel::B => "b",
            Channel::H => "h",
            Channel::S => "s",
            Channel::V => "v",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "R" => Ok(Channel::R),
            "G" => Ok(Channel::G),
            "B" => Ok(Channel::B),
            "H" => Ok(Channel::H),
            "S" => Ok(Channel::S),
            "V" => Ok(Channel::V),
            other => Err(format!("unknown channel '{other}'")),
        }
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
///
/// Achromatic colours (s = 0) carry the canonical hue 0 so downstream means
/// stay well-defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvTriple<T: Real> {
    pub h: T,
    pub s: T,
    pub v: T,
}

/// Standard hexcone RGB -> HSV conversion.
pub fn rgb_to_hsv<T: Real>(r: u8, g: u8, b: u8) -> HsvTriple<T> {
    rgbf_to_hsv(r as f64, g as f64, b as f64)
}

/// Hexcone conversion for real-valued intensities in `[0, 255]`, used for
/// region means.
pub fn rgbf_to_hsv<T: Real>(rf: f64, gf: f64, bf: f64) -> HsvTriple<T> {
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;

    let v = max / 255.0;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else {
        let sector = if max == rf {
            ((gf - bf) / delta).rem_euclid(6.0)
        } else if max == gf {
            (bf - rf) / delta + 2.0
        } else {
            (rf - gf) / delta + 4.0
        };
        let h = 60.0 * sector;
        if h >= 360.0 { h - 360.0 } else { h }
    };

    HsvTriple {
        h: T::of(h),
        s: T::of(s),
        v: T::of(v),
    }
}
