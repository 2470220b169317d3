//! 16-bit grayscale PNG disparity maps.
//!
//! A valid disparity `d` is stored as `max(1, round(d * 256))`; raw 0 marks
//! an invalid pixel. Representable disparities are `[0, 256)`, so the
//! roundtrip error is at most `1/512` (except for values below `1/512`,
//! which come back as `1/256`).

use std::io::{BufRead, BufReader, Read, Seek, Write};

use crate::error::{Error, Location, Result};
use crate::scalar::Scalar;
use crate::types::{DisparityMap, Grid};

const SCALE: f64 = 256.0;

pub fn write_png16<T: Scalar>(map: &DisparityMap<T>, w: impl Write) -> Result<()> {
    let (height, width) = map.dims();
    let mut data = Vec::with_capacity(height * width * 2);
    for r in 0..height {
        for c in 0..width {
            let raw = match map.get(r, c) {
                None => 0u16,
                Some(d) => {
                    let d = d.as_f64();
                    if !(0.0..SCALE).contains(&d) {
                        return Err(Error::InvalidValue {
                            row: r,
                            col: c,
                            reason: format!("disparity {d} outside the PNG16 range [0, 256)"),
                        });
                    }
                    ((d * SCALE).round() as u32).clamp(1, u16::MAX as u32) as u16
                }
            };
            data.extend_from_slice(&raw.to_be_bytes());
        }
    }
    let (w32, h32) = (u32::try_from(width), u32::try_from(height));
    let (Ok(w32), Ok(h32)) = (w32, h32) else {
        return Err(Error::Encode("image too large for PNG".into()));
    };
    let mut encoder = png::Encoder::new(w, w32, h32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Sixteen);
    let mut writer = encoder.write_header().map_err(|e| Error::Encode(e.to_string()))?;
    writer.write_image_data(&data).map_err(|e| Error::Encode(e.to_string()))?;
    writer.finish().map_err(|e| Error::Encode(e.to_string()))?;
    Ok(())
}

pub fn read_png16<T: Scalar>(r: impl Read) -> Result<DisparityMap<T>> {
    let mut bytes = Vec::new();
    BufReader::new(r).read_to_end(&mut bytes)?;
    decode(std::io::Cursor::new(bytes))
}

fn decode<T: Scalar, R: BufRead + Seek>(r: R) -> Result<DisparityMap<T>> {
    let bad = |e: png::DecodingError| Error::parse(Location::Byte(0), e.to_string());
    let mut decoder = png::Decoder::new(r);
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(bad)?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(Error::parse(
            Location::Byte(0),
            format!("expected 16-bit grayscale, found {:?} {:?}", info.color_type, info.bit_depth),
        ));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::parse(Location::Byte(0), "image too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(bad)?;
    let line = frame.line_size;
    let mut values = Grid::filled(height, width, T::zero());
    let mut valid = Grid::filled(height, width, false);
    for r in 0..height {
        let row = &buf[r * line..r * line + width * 2];
        for c in 0..width {
            let raw = u16::from_be_bytes([row[2 * c], row[2 * c + 1]]);
            if raw > 0 {
                values.set(r, c, T::of(raw as f64 / SCALE));
                valid.set(r, c, true);
            }
        }
    }
    DisparityMap::new(values, valid)
}
