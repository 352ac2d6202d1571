use std::fs;
use std::path::Path;

use crate::error::{invalid, HfrepError, Result};

/// RGB8 image, rows from top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl FieldImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(invalid(format!("{} pixels for a {width}x{height} image", pixels.len())));
        }
        Ok(FieldImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, row: usize) -> [u8; 3] {
        self.pixels[row * self.width + x]
    }

    /// Binary PPM (P6) bytes.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(3 * self.pixels.len());
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    /// Parses a P6 file with maxval 255, as written by [`FieldImage::to_ppm`].
    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| HfrepError::Format(format!("ppm: {m}"));
        let mut fields = Vec::new();
        let mut at = 0;
        while fields.len() < 4 {
            while at < bytes.len() && bytes[at].is_ascii_whitespace() {
                at += 1;
            }
            if bytes.get(at) == Some(&b'#') {
                while at < bytes.len() && bytes[at] != b'\n' {
                    at += 1;
                }
                continue;
            }
            let start = at;
            while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
                at += 1;
            }
            if start == at {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..at]).map_err(|_| bad("header is not text"))?);
        }
        if fields[0] != "P6" {
            return Err(bad("not a P6 file"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
        let (w, h, max) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        if max != 255 {
            return Err(bad("only maxval 255 is supported"));
        }
        let data = &bytes[at + 1..];
        if data.len() != 3 * w * h {
            return Err(bad("pixel data length does not match the header"));
        }
        let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        FieldImage::new(w, h, pixels)
    }

    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_ppm())?;
        Ok(())
    }

    pub fn read_ppm(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_ppm(&fs::read(path)?)
    }
}

pub(crate) fn to_rgb8(c: [f64; 3]) -> [u8; 3] {
    c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
}
