//! Sparse hints as CSV: header `x,y,d`, `x` = row, `y` = column.
//!
//! Values are written with the shortest representation that parses back to
//! the same floating-point number, so a roundtrip is exact.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Location, Result};
use crate::scalar::Scalar;
use crate::types::HintMap;

pub const HEADER: [&str; 3] = ["x", "y", "d"];

pub fn write_hints_csv<T: Scalar>(h: &HintMap<T>, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Encode(e.to_string());
    out.write_record(HEADER).map_err(csv_err)?;
    for (r, c, v) in h.iter_hints() {
        out.write_record([r.to_string(), c.to_string(), v.to_string()]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads hints into a `height x width` map. Coordinates must be in bounds and
/// unique, values finite and positive.
pub fn read_hints_csv<T: Scalar>(r: impl Read, height: usize, width: usize) -> Result<HintMap<T>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut h = HintMap::new(height, width);
    let mut seen: HashMap<(usize, usize), u64> = HashMap::new();
    let mut header_done = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(Location::Line(line), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let at = Location::Line(line);
        if !header_done {
            if record.iter().map(str::trim).ne(HEADER) {
                return Err(Error::parse(at, "expected header `x,y,d`"));
            }
            header_done = true;
            continue;
        }
        if record.len() != 3 {
            return Err(Error::parse(at, format!("expected 3 fields, found {}", record.len())));
        }
        let coord = |i: usize, name: &str| -> Result<usize> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| Error::parse(at, format!("invalid {name} `{}`", &record[i])))
        };
        let (x, y) = (coord(0, "x")?, coord(1, "y")?);
        let d: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(at, format!("invalid d `{}`", &record[2])))?;
        if x >= height || y >= width {
            return Err(Error::parse(at, format!("({x}, {y}) outside {height}x{width} map")));
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::parse(at, format!("disparity must be finite and positive, got {d}")));
        }
        if let Some(first) = seen.insert((x, y), line) {
            return Err(Error::parse(at, format!("duplicate hint at ({x}, {y}), first on line {first}")));
        }
        h.put(x, y, T::of(d));
    }
    if !header_done {
        return Err(Error::parse(Location::Line(1), "missing header `x,y,d`"));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let h = HintMap::from_hints(4, 5, [(3, 1, 0.1 + 0.2), (0, 4, 1e-7), (2, 2, 191.99999)]).unwrap();
        let mut buf = Vec::new();
        write_hints_csv(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,d\n0,4,"));
        assert_eq!(read_hints_csv::<f64>(&buf[..], 4, 5).unwrap(), h);
    }

    #[test]
    fn errors_carry_lines() {
        let cases: [(&str, u64); 5] = [
            ("a,b,c\n", 1),
            ("x,y,d\n0,0,1\n9,0,1\n", 3),
            ("x,y,d\n0,0,1\n1,1,2\n0,0,3\n", 4),
            ("x,y,d\n0,0,-1\n", 2),
            ("x,y,d\n0,zero,1\n", 2),
        ];
        for (text, line) in cases {
            let err = read_hints_csv::<f64>(text.as_bytes(), 4, 4).unwrap_err();
            assert_eq!(err.location(), Some(Location::Line(line)), "{text:?}: {err}");
        }
    }
}
