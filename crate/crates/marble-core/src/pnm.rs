//! Netpbm decoding and encoding: binary P6/P5 and ASCII P3/P2.
//!
//! Header comments starting with `#` are allowed, decode is bit-exact, and
//! every error carries the byte offset at which it was detected. Sources
//! with a max value other than 255 are rescaled by `round(v * 255 / maxval)`;
//! binary streams with maxval > 255 use the usual big-endian 16-bit samples.

use thiserror::Error;

use crate::raster::{Raster, Rgb};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("byte {offset}: malformed magic number")]
    BadMagic { offset: usize },
    #[error("byte {offset}: unexpected end of stream while reading {what}")]
    Truncated { offset: usize, what: &'static str },
    #[error("byte {offset}: invalid {what} token")]
    BadToken { offset: usize, what: &'static str },
    #[error("byte {offset}: zero image dimension")]
    ZeroDimension { offset: usize },
    #[error("byte {offset}: max value {maxval} out of range 1..=65535")]
    BadMaxval { offset: usize, maxval: u64 },
    #[error("byte {offset}: sample value {value} exceeds max value {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u64,
        maxval: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    PlainGrey,  // P2
    PlainRgb,   // P3
    BinaryGrey, // P5
    BinaryRgb,  // P6
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments (header context only).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next_number(&mut self, what: &'static str) -> Result<u64, PnmError> {
        self.skip_separators();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Err(PnmError::Truncated {
                offset: start,
                what,
            });
        }
        let mut value: u64 = 0;
        let mut digits = 0usize;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            value = value
                .saturating_mul(10)
                .saturating_add((self.bytes[self.pos] - b'0') as u64);
            self.pos += 1;
            digits += 1;
        }
        if digits == 0 {
            return Err(PnmError::BadToken {
                offset: start,
                what,
            });
        }
        Ok(value)
    }
}

/// Decodes a PPM (P3/P6) or PGM (P2/P5) stream. Grey formats replicate the
/// sample into all three channels.
pub fn decode(bytes: &[u8]) -> Result<Raster, PnmError> {
    let mut cur = Cursor::new(bytes);
    cur.skip_separators();
    let magic_offset = cur.pos;
    if bytes.len() < magic_offset + 2 {
        return Err(PnmError::BadMagic {
            offset: magic_offset,
        });
    }
    let format = match &bytes[magic_offset..magic_offset + 2] {
        b"P2" => Format::PlainGrey,
        b"P3" => Format::PlainRgb,
        b"P5" => Format::BinaryGrey,
        b"P6" => Format::BinaryRgb,
        _ => {
            return Err(PnmError::BadMagic {
                offset: magic_offset,
            });
        }
    };
    cur.pos = magic_offset + 2;

    let width_offset = {
        cur.skip_separators();
        cur.pos
    };
    let width = cur.next_number("width")?;
    let height_offset = {
        cur.skip_separators();
        cur.pos
    };
    let height = cur.next_number("height")?;
    if width == 0 || height == 0 {
        return Err(PnmError::ZeroDimension {
            offset: if width == 0 {
                width_offset
            } else {
                height_offset
            },
        });
    }
    let maxval_offset = {
        cur.skip_separators();
        cur.pos
    };
    let maxval = cur.next_number("max value")?;
    if maxval == 0 || maxval > 65535 {
        return Err(PnmError::BadMaxval {
            offset: maxval_offset,
            maxval,
        });
    }

    let width = width as usize;
    let height = height as usize;
    let channels = match format {
        Format::PlainGrey | Format::BinaryGrey => 1usize,
        Format::PlainRgb | Format::BinaryRgb => 3usize,
    };
    let sample_count = width * height * channels;
    let mut samples = Vec::with_capacity(sample_count);

    match format {
        Format::PlainGrey | Format::PlainRgb => {
            for _ in 0..sample_count {
                let offset = {
                    cur.skip_separators();
                    cur.pos
                };
                let v = cur.next_number("sample")?;
                if v > maxval {
                    return Err(PnmError::SampleOutOfRange {
                        offset,
                        value: v,
                        maxval,
                    });
                }
                samples.push(v);
            }
        }
        Format::BinaryGrey | Format::BinaryRgb => {
            // Exactly one whitespace byte separates the header from the data.
            if cur.pos >= bytes.len() {
                return Err(PnmError::Truncated {
                    offset: cur.pos,
                    what: "pixel data",
                });
            }
            if !bytes[cur.pos].is_ascii_whitespace() {
                return Err(PnmError::BadToken {
                    offset: cur.pos,
                    what: "header/data separator",
                });
            }
            cur.pos += 1;
            let wide = maxval > 255;
            let bytes_per_sample = if wide { 2 } else { 1 };
            for _ in 0..sample_count {
                if cur.pos + bytes_per_sample > bytes.len() {
                    return Err(PnmError::Truncated {
                        offset: bytes.len(),
                        what: "pixel data",
                    });
                }
                let v = if wide {
                    ((bytes[cur.pos] as u64) << 8) | bytes[cur.pos + 1] as u64
                } else {
                    bytes[cur.pos] as u64
                };
                if v > maxval {
                    return Err(PnmError::SampleOutOfRange {
                        offset: cur.pos,
                        value: v,
                        maxval,
                    });
                }
                cur.pos += bytes_per_sample;
                samples.push(v);
            }
        }
    }

    let rescale = |v: u64| -> u8 {
        if maxval == 255 {
            v as u8
        } else {
            ((v as f64 * 255.0 / maxval as f64).round()) as u8
        }
    };

    let pixels: Vec<Rgb> = match channels {
        1 => samples.iter().map(|&v| Rgb::grey(rescale(v))).collect(),
        _ => samples
            .chunks_exact(3)
            .map(|c| Rgb::new(rescale(c[0]), rescale(c[1]), rescale(c[2])))
            .collect(),
    };

    Ok(Raster::new(width, height, pixels).expect("validated dimensions"))
}

/// Encodes as binary PPM (P6), maxval 255.
pub fn encode_p6(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width(), raster.height()).into_bytes();
    out.reserve(raster.pixels().len() * 3);
    for p in raster.pixels() {
        out.extend_from_slice(&[p.r, p.g, p.b]);
    }
    out
}

/// Encodes the red channel as binary PGM (P5), maxval 255. Intended for
/// rasters with r = g = b.
pub fn encode_p5(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width(), raster.height()).into_bytes();
    out.extend(raster.pixels().iter().map(|p| p.r));
    out
}

/// Encodes as ASCII PPM (P3), maxval 255.
pub fn encode_p3(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P3\n{} {}\n255\n", raster.width(), raster.height());
    for row in raster.pixels().chunks(raster.width()) {
        let line: Vec<String> = row
            .iter()
            .map(|p| format!("{} {} {}", p.r, p.g, p.b))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}
