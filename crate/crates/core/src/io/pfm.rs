//! Grayscale Portable Float Map.
//!
//! The writer always emits `Pf\n<width> <height>\n-1.0\n` followed by
//! little-endian `f32` samples, bottom row first. The reader also accepts
//! big-endian files (positive scale) and any whitespace between header
//! tokens, but exactly one whitespace byte must separate the scale from the
//! samples. `+inf` samples are invalid pixels; NaN and `-inf` are rejected.

use std::io::{Read, Write};

use crate::error::{Error, Location, Result};
use crate::scalar::Scalar;
use crate::types::{DisparityMap, Grid};

pub fn write_pfm<T: Scalar>(map: &DisparityMap<T>, mut w: impl Write) -> Result<()> {
    let (height, width) = map.dims();
    write!(w, "Pf\n{width} {height}\n-1.0\n")?;
    let mut row_bytes = Vec::with_capacity(width * 4);
    for r in (0..height).rev() {
        row_bytes.clear();
        for c in 0..width {
            let v = map.get(r, c).map_or(f32::INFINITY, |v| v.as_f64() as f32);
            row_bytes.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&row_bytes)?;
    }
    Ok(())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_whitespace(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next whitespace-delimited token and its offset.
    fn token(&mut self, what: &str) -> Result<(&str, usize)> {
        self.skip_whitespace();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(Location::Byte(start as u64), format!("missing {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::parse(Location::Byte(start as u64), format!("{what} is not ASCII")))?;
        Ok((text, start))
    }
}

pub fn read_pfm<T: Scalar>(mut r: impl Read) -> Result<DisparityMap<T>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let at = |pos: usize| Location::Byte(pos as u64);

    match bytes.get(..2) {
        Some(b"Pf") => {}
        Some(b"PF") => return Err(Error::parse(at(0), "expected grayscale PFM, found color `PF`")),
        _ => return Err(Error::parse(at(0), "missing `Pf` magic")),
    }
    if !bytes.get(2).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::parse(at(2), "expected whitespace after magic"));
    }
    let mut header = Header { bytes: &bytes, pos: 2 };
    let dim = |(text, pos): (&str, usize), what: &str| -> Result<usize> {
        match text.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::parse(at(pos), format!("invalid {what} `{text}`"))),
        }
    };
    let width = dim(header.token("width")?, "width")?;
    let height = dim(header.token("height")?, "height")?;
    let (scale_text, scale_pos) = header.token("scale")?;
    let scale: f64 = scale_text
        .parse()
        .ok()
        .filter(|s: &f64| s.is_finite() && *s != 0.0)
        .ok_or_else(|| Error::parse(at(scale_pos), format!("invalid scale `{scale_text}`")))?;
    let little_endian = scale < 0.0;
    if !bytes.get(header.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::parse(at(header.pos), "expected a single whitespace byte after scale"));
    }
    let start = header.pos + 1;

    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::parse(at(0), "dimensions overflow"))?;
    let payload = &bytes[start..];
    if payload.len() < expected {
        return Err(Error::parse(
            at(bytes.len()),
            format!("truncated payload: expected {expected} bytes, found {}", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(Error::parse(
            at(start + expected),
            format!("{} trailing bytes after payload", payload.len() - expected),
        ));
    }

    let mut values = Grid::filled(height, width, T::zero());
    let mut valid = Grid::filled(height, width, false);
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
        let (r, c) = (height - 1 - k / width, k % width);
        if v.is_finite() {
            values.set(r, c, T::of(v as f64));
            valid.set(r, c, true);
        } else if v != f32::INFINITY {
            return Err(Error::parse(at(start + 4 * k), format!("sample {v} is neither finite nor +inf")));
        }
    }
    DisparityMap::new(values, valid)
}
