//! File formats.
//!
//! | format | layout |
//! |---|---|
//! | PFM | `Pf\n<w> <h>\n-1.0\n`, then `w*h` little-endian `f32`, bottom row first; invalid pixels are `+inf` |
//! | PNG16 | 16-bit grayscale PNG, `raw = round(d * 256)`, raw 0 marks an invalid pixel |
//! | hints CSV | header `x,y,d`, one hint per line, `x` = row, `y` = column, sorted by `(x, y)` |
//! | PPM | binary `P6` visualization with a fixed five-stop colormap |
//! | scene config | `key=value` lines describing a [`SceneSpec`](crate::synth::SceneSpec) |
//!
//! Hint files use `(row, col)` order, matching the rest of the crate. Many
//! disparity tools use `(col, row)`; swap columns when exchanging files with
//! them.

mod hints_csv;
mod pfm;
mod png16;
mod scene_cfg;
mod visual;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub use hints_csv::{read_hints_csv, write_hints_csv};
pub use pfm::{read_pfm, write_pfm};
pub use png16::{read_png16, write_png16};
pub use scene_cfg::{read_scene_spec, write_scene_spec};
pub use visual::{colormap, write_visualization, Render};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::synth::SceneSpec;
use crate::types::{DisparityMap, HintMap};

pub fn load_pfm<T: Scalar>(path: impl AsRef<Path>) -> Result<DisparityMap<T>> {
    read_pfm(BufReader::new(File::open(path)?))
}

pub fn save_pfm<T: Scalar>(map: &DisparityMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pfm(map, &mut w)?;
    Ok(w.flush()?)
}

pub fn load_png16<T: Scalar>(path: impl AsRef<Path>) -> Result<DisparityMap<T>> {
    read_png16(BufReader::new(File::open(path)?))
}

pub fn save_png16<T: Scalar>(map: &DisparityMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_png16(map, &mut w)?;
    Ok(w.flush()?)
}

/// Loads a disparity map, choosing the format by extension (`.pfm` or
/// `.png`).
pub fn load_disparity<T: Scalar>(path: impl AsRef<Path>) -> Result<DisparityMap<T>> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => load_png16(path),
        _ => load_pfm(path),
    }
}

pub fn load_hints<T: Scalar>(path: impl AsRef<Path>, height: usize, width: usize) -> Result<HintMap<T>> {
    read_hints_csv(BufReader::new(File::open(path)?), height, width)
}

pub fn save_hints<T: Scalar>(h: &HintMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_hints_csv(h, &mut w)?;
    Ok(w.flush()?)
}

pub fn save_visualization<T: Scalar>(
    map: &impl Render<T>,
    d_min: f64,
    d_max: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_visualization(map, d_min, d_max, &mut w)?;
    Ok(w.flush()?)
}

pub fn load_scene_spec(path: impl AsRef<Path>) -> Result<SceneSpec> {
    read_scene_spec(BufReader::new(File::open(path)?))
}

pub fn save_scene_spec(spec: &SceneSpec, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_scene_spec(spec, &mut w)?;
    Ok(w.flush()?)
}
