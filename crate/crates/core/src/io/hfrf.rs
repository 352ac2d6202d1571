//! Raw field files: `"HFRF"`, then little-endian `u32` version, `u32`
//! dimension, one `u32` node count per axis, the box minimum and maximum as
//! `f64` (all minimum components first), and finally the `f64` node values
//! with the x index running fastest.

use std::fs;
use std::path::Path;

use crate::error::{HfrepError, Result};
use crate::grid::{BoundingBox, Point, ScalarGrid};

pub const MAGIC: &[u8; 4] = b"HFRF";
pub const VERSION: u32 = 1;

pub fn encode_hfrf(g: &ScalarGrid) -> Vec<u8> {
    let d = g.dim();
    let mut out = Vec::with_capacity(12 + 4 * d + 16 * d + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for n in &g.dims()[..d] {
        out.extend_from_slice(&(*n as u32).to_le_bytes());
    }
    for corner in [g.bbox().min, g.bbox().max] {
        for c in &corner.0[..d] {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    for v in g.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.at + N;
        let chunk = self
            .bytes
            .get(self.at..end)
            .ok_or_else(|| HfrepError::Format(format!("file truncated at byte {}", self.at)))?;
        self.at = end;
        Ok(chunk.try_into().unwrap())
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_hfrf(bytes: &[u8]) -> Result<ScalarGrid> {
    let mut r = Reader { bytes, at: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(HfrepError::Format("missing HFRF magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(HfrepError::Format(format!("unsupported version {version}")));
    }
    let d = r.u32()? as usize;
    if d != 2 && d != 3 {
        return Err(HfrepError::Format(format!("dimension must be 2 or 3, got {d}")));
    }
    let dims = (0..d).map(|_| r.u32().map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
    let mut lo = Point::ORIGIN;
    let mut hi = Point::ORIGIN;
    for c in &mut lo.0[..d] {
        *c = r.f64()?;
    }
    for c in &mut hi.0[..d] {
        *c = r.f64()?;
    }
    let count = dims.iter().try_fold(1usize, |acc, n| acc.checked_mul(*n));
    let count = count.filter(|c| c.checked_mul(8).is_some_and(|b| b == bytes.len() - r.at));
    let count = count.ok_or_else(|| {
        HfrepError::Format(format!("{} value bytes do not match dims {dims:?}", bytes.len() - r.at))
    })?;
    let values = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let bbox = BoundingBox::new(lo, hi, d).map_err(|e| HfrepError::Format(e.to_string()))?;
    ScalarGrid::new(&dims, bbox, values).map_err(|e| HfrepError::Format(e.to_string()))
}

pub fn write_hfrf(path: impl AsRef<Path>, g: &ScalarGrid) -> Result<()> {
    fs::write(path, encode_hfrf(g))?;
    Ok(())
}

pub fn read_hfrf(path: impl AsRef<Path>) -> Result<ScalarGrid> {
    decode_hfrf(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let bbox = BoundingBox::new2([-1.0, -2.0], [1.0, 2.0]).unwrap();
        let g = ScalarGrid::new(&[2, 3], bbox, vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]).unwrap();
        let b = encode_hfrf(&g);
        assert_eq!(&b[..4], b"HFRF");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[8..12], &[2, 0, 0, 0]);
        assert_eq!(&b[12..20], &[2, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(f64::from_le_bytes(b[20..28].try_into().unwrap()), -1.0);
        assert_eq!(f64::from_le_bytes(b[28..36].try_into().unwrap()), -2.0);
        assert_eq!(f64::from_le_bytes(b[36..44].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(b[52..60].try_into().unwrap()), 0.5);
        assert_eq!(b.len(), 52 + 6 * 8);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let g = ScalarGrid::from_fn(&[5, 4, 3], BoundingBox::centered_cube(1.5), |p| {
            p.x().sin() * 1e-300 + p.y() / 3.0 - p.z()
        })
        .unwrap();
        let b = encode_hfrf(&g);
        let back = decode_hfrf(&b).unwrap();
        assert_eq!(back.dims(), g.dims());
        assert_eq!(encode_hfrf(&back), b);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let g = ScalarGrid::filled(&[3, 3], BoundingBox::centered_square(1.0), 1.0).unwrap();
        let b = encode_hfrf(&g);
        assert!(decode_hfrf(&b[..b.len() - 1]).is_err());
        let mut extra = b.clone();
        extra.push(0);
        assert!(decode_hfrf(&extra).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(decode_hfrf(&bad).is_err());
        let mut v2 = b.clone();
        v2[4] = 2;
        assert!(decode_hfrf(&v2).is_err());
        let mut d4 = b;
        d4[8] = 4;
        assert!(decode_hfrf(&d4).is_err());
        assert!(decode_hfrf(b"HF").is_err());
    }
}
