use std::path::Path;

use anyhow::{Context, Result};
use densify::{GrayImage, RgbImage};

/// Loads an 8-bit image and normalizes it to `[0, 1]`.
pub fn load_rgb(path: &Path) -> Result<RgbImage<f64>> {
    let img = image::open(path).with_context(|| format!("reading {}", path.display()))?.to_rgb8();
    let (w, h) = img.dimensions();
    Ok(RgbImage::from_rgb8(h as usize, w as usize, img.as_raw())?)
}

pub fn load_gray(path: &Path) -> Result<GrayImage<f64>> {
    Ok(load_rgb(path)?.to_gray())
}

/// Saves as 8-bit RGB PNG.
pub fn save_rgb(img: &RgbImage<f64>, path: &Path) -> Result<()> {
    let (h, w) = img.dims();
    let buf = image::RgbImage::from_raw(w as u32, h as u32, img.to_rgb8()).context("image buffer size")?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .with_context(|| format!("writing {}", path.display()))
}
