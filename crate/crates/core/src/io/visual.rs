//! Binary PPM (`P6`) visualization.
//!
//! Disparities are normalized to `t = (d - d_min) / (d_max - d_min)`, clamped
//! to `[0, 1]`, and mapped piecewise-linearly through five stops: blue
//! `(0,0,255)` at 0, cyan `(0,255,255)` at 0.25, green `(0,255,0)` at 0.5,
//! yellow `(255,255,0)` at 0.75 and red `(255,0,0)` at 1. Invalid and
//! unhinted pixels are black. Hints are drawn as 3x3 dots so sparse maps stay
//! visible.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{DisparityMap, Grid, HintMap};

const STOPS: [[f64; 3]; 5] = [
    [0.0, 0.0, 255.0],
    [0.0, 255.0, 255.0],
    [0.0, 255.0, 0.0],
    [255.0, 255.0, 0.0],
    [255.0, 0.0, 0.0],
];

/// Color of disparity `d` over `[d_min, d_max]`.
pub fn colormap(d: f64, d_min: f64, d_max: f64) -> [u8; 3] {
    let span = d_max - d_min;
    let t = if span > 0.0 { ((d - d_min) / span).clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let mut out = [0u8; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (STOPS[i][k] * (1.0 - f) + STOPS[i + 1][k] * f).round() as u8;
    }
    out
}

/// Maps that can be rendered to an RGB raster.
pub trait Render<T> {
    fn render(&self, d_min: f64, d_max: f64) -> Grid<[u8; 3]>;
}

impl<T: Scalar> Render<T> for DisparityMap<T> {
    fn render(&self, d_min: f64, d_max: f64) -> Grid<[u8; 3]> {
        let (h, w) = self.dims();
        Grid::from_fn(h, w, |r, c| self.get(r, c).map_or([0; 3], |d| colormap(d.as_f64(), d_min, d_max)))
    }
}

impl<T: Scalar> Render<T> for HintMap<T> {
    fn render(&self, d_min: f64, d_max: f64) -> Grid<[u8; 3]> {
        let (h, w) = self.dims();
        let mut out = Grid::filled(h, w, [0u8; 3]);
        for (r, c, d) in self.iter_hints() {
            let color = colormap(d.as_f64(), d_min, d_max);
            for rr in r.saturating_sub(1)..(r + 2).min(h) {
                for cc in c.saturating_sub(1)..(c + 2).min(w) {
                    out.set(rr, cc, color);
                }
            }
        }
        out
    }
}

pub fn write_visualization<T: Scalar>(
    map: &impl Render<T>,
    d_min: f64,
    d_max: f64,
    mut w: impl Write,
) -> Result<()> {
    if !(d_min.is_finite() && d_max.is_finite() && d_max > d_min) {
        return Err(Error::param("range", format!("need finite d_min < d_max, got [{d_min}, {d_max}]")));
    }
    let img = map.render(d_min, d_max);
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height())?;
    let bytes: Vec<u8> = img.as_slice().iter().flatten().copied().collect();
    w.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_stops() {
        assert_eq!(colormap(0.0, 0.0, 4.0), [0, 0, 255]);
        assert_eq!(colormap(2.0, 0.0, 4.0), [0, 255, 0]);
        assert_eq!(colormap(9.0, 0.0, 4.0), [255, 0, 0]);
        assert_eq!(colormap(0.5, 0.0, 4.0), [0, 128, 255]);
    }

    #[test]
    fn constant_map_is_one_color() {
        let m = DisparityMap::from_values(Grid::filled(3, 4, 10.0f64));
        let mut buf = Vec::new();
        write_visualization(&m, 0.0, 64.0, &mut buf).unwrap();
        let header = b"P6\n4 3\n255\n";
        assert_eq!(&buf[..header.len()], header);
        let px: Vec<_> = buf[header.len()..].chunks(3).collect();
        assert_eq!(px.len(), 12);
        assert!(px.iter().all(|p| *p == px[0]));
    }

    #[test]
    fn hints_are_dots() {
        let h = HintMap::from_hints(5, 5, [(0, 0, 1.0f64)]).unwrap();
        let img = h.render(0.0, 1.0);
        assert_eq!(img.get(1, 1), [255, 0, 0]);
        assert_eq!(img.get(2, 2), [0, 0, 0]);
    }
}
