//! Seeded synthetic piecewise-planar stereo scenes.
//!
//! # Random numbers
//!
//! All randomness comes from ChaCha8 keyed with the scene seed as eight
//! little-endian bytes followed by 24 zero bytes. Independent concerns use
//! separate ChaCha stream ids ([`STREAM_GEOMETRY`], [`STREAM_TEXTURE`],
//! [`STREAM_HINTS`]) so changing one never perturbs another. Conversions
//! from the raw `u64` words:
//!
//! * uniform in `[0, 1)`: `(w >> 11) * 2^-53`;
//! * uniform in `[a, b)`: `a + (b - a) * u`;
//! * integer in `lo..=hi`: `lo + floor(u * (hi - lo + 1))`;
//! * standard normal: Box-Muller from two uniforms `u1, u2`,
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` (the sine branch is discarded).
//!
//! # Hint sampling weights
//!
//! Hints are drawn where the left image has texture: each pixel is weighted
//! by the magnitude of a 3x3 Scharr gradient of its Rec. 601 luma `L`,
//! with clamped borders,
//!
//! ```text
//! gx = 3 (L[r-1,c+1] - L[r-1,c-1]) + 10 (L[r,c+1] - L[r,c-1]) + 3 (L[r+1,c+1] - L[r+1,c-1])
//! gy = 3 (L[r+1,c-1] - L[r-1,c-1]) + 10 (L[r+1,c] - L[r-1,c]) + 3 (L[r+1,c+1] - L[r-1,c+1])
//! w  = sqrt(gx^2 + gy^2) / 32
//! ```
//!
//! and sampling without replacement uses the Efraimidis-Spirakis keys
//! `ln(1 - u) / w` (one uniform per pixel in row-major order, largest keys
//! win, ties to the lower index).

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{DisparityMap, GrayImage, Grid, HintMap, RgbImage};

pub const STREAM_GEOMETRY: u64 = 0;
pub const STREAM_TEXTURE: u64 = 1;
pub const STREAM_HINTS: u64 = 2;

/// Smallest disparity a noisy hint is clamped to.
pub const MIN_HINT: f64 = 0.01;

/// Portable seeded generator; see the module docs for the exact layout.
#[derive(Debug, Clone)]
pub struct SceneRng {
    inner: ChaCha8Rng,
}

impl SceneRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextureKind {
    /// Band-limited value noise over the whole surface.
    #[default]
    Noise,
    /// Smooth intensity ramp per plane.
    Gradient,
    /// 8-pixel checkerboard.
    Checker,
    /// Flat surfaces of equal luma scattered with small noisy spots, so
    /// texture (and with it the hint sampling weight) is concentrated in a
    /// few places, the way keypoints cluster on textured patches.
    Features,
}

impl TextureKind {
    fn name(self) -> &'static str {
        match self {
            TextureKind::Noise => "noise",
            TextureKind::Gradient => "gradient",
            TextureKind::Checker => "checker",
            TextureKind::Features => "features",
        }
    }
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise" => Ok(TextureKind::Noise),
            "gradient" => Ok(TextureKind::Gradient),
            "checker" => Ok(TextureKind::Checker),
            "features" => Ok(TextureKind::Features),
            _ => Err(Error::param("texture", format!("unknown texture `{s}`"))),
        }
    }
}

/// Everything needed to regenerate a scene bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub planes: usize,
    pub d_min: f64,
    pub d_max: f64,
    /// Bound on `|a|` and `|b|` of each plane `d = a x + b y + c`.
    pub max_slope: f64,
    pub texture: TextureKind,
    /// Target fraction of pixels carrying a hint.
    pub density: f64,
    /// Standard deviation of the Gaussian hint noise, in pixels.
    pub noise_sigma: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            height: 240,
            width: 320,
            planes: 4,
            d_min: 0.0,
            d_max: 64.0,
            max_slope: 0.05,
            texture: TextureKind::Noise,
            density: 0.002,
            noise_sigma: 0.0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.height < 3 || self.width < 3 {
            return Err(Error::param("dims", "scene must be at least 3x3"));
        }
        if self.planes < 1 {
            return Err(Error::param("planes", "need at least one plane"));
        }
        if !(self.d_min >= 0.0 && self.d_min < self.d_max && self.d_max.is_finite()) {
            return Err(Error::param("d_min/d_max", "need 0 <= d_min < d_max"));
        }
        if !(self.max_slope >= 0.0 && self.max_slope.is_finite()) {
            return Err(Error::param("max_slope", "must be finite and >= 0"));
        }
        if !(self.density > 0.0 && self.density <= 0.05) {
            return Err(Error::param("density", format!("must lie in (0, 0.05], got {}", self.density)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param("noise_sigma", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Number of hints [`sample_hints`] draws: `round(density * area)`.
    pub fn hint_count(&self) -> usize {
        (self.density * (self.height * self.width) as f64).round() as usize
    }
}

/// `d = a * row + b * col + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub color: [f64; 3],
}

impl Plane {
    #[inline]
    pub fn eval(&self, row: f64, col: f64) -> f64 {
        self.a * row + self.b * col + self.c
    }

    /// Norm of the disparity gradient.
    pub fn slope(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// A generated scene: left view, ground truth and the plane layout behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarScene<T> {
    pub left: RgbImage<T>,
    pub disparity: DisparityMap<T>,
    pub planes: Vec<Plane>,
    /// Index into `planes` for every pixel.
    pub labels: Grid<u16>,
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = h6.floor() as u32 % 6;
    let f = h6 - h6.floor();
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    match sector {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Luma of every color returned.
const FLAT_LUMA: f64 = 0.6;

/// Desaturates `color` towards white and rescales it to [`FLAT_LUMA`], so
/// surfaces differ in hue but not in brightness.
fn equal_luma(color: [f64; 3]) -> [f64; 3] {
    let mixed = color.map(|c| 0.4 * c + 0.6);
    let luma = 0.299 * mixed[0] + 0.587 * mixed[1] + 0.114 * mixed[2];
    mixed.map(|c| c * FLAT_LUMA / luma)
}

/// Convex polygon from sorted random angles and radii.
struct Polygon {
    vertices: Vec<(f64, f64)>,
}

impl Polygon {
    fn random(rng: &mut SceneRng, height: usize, width: usize) -> Self {
        let (h, w) = (height as f64, width as f64);
        let center = (rng.range(0.0, h), rng.range(0.0, w));
        let radius = rng.range(0.15, 0.35) * h.min(w);
        let n = rng.int(5, 8);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.range(0.0, std::f64::consts::TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let vertices = angles
            .iter()
            .map(|&t| {
                let r = radius * rng.range(0.6, 1.0);
                (center.0 + r * t.sin(), center.1 + r * t.cos())
            })
            .collect();
        Self { vertices }
    }

    /// Even-odd rule.
    fn contains(&self, x: f64, y: f64) -> bool {
        let v = &self.vertices;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (xi, yi) = v[i];
            let (xj, yj) = v[j];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

/// Plane whose disparity stays inside the scene range over the whole image.
fn random_plane(rng: &mut SceneRng, spec: &SceneSpec) -> Plane {
    let span = spec.d_max - spec.d_min;
    let center = rng.range(spec.d_min + 0.15 * span, spec.d_max - 0.15 * span);
    let mut a = rng.range(-spec.max_slope, spec.max_slope);
    let mut b = rng.range(-spec.max_slope, spec.max_slope);
    let (rc, cc) = ((spec.height - 1) as f64 / 2.0, (spec.width - 1) as f64 / 2.0);
    let room = (center - spec.d_min).min(spec.d_max - center) - 0.05 * span;
    let extent = a.abs() * rc + b.abs() * cc;
    if extent > room {
        let s = room / extent;
        a *= s;
        b *= s;
    }
    let color = hsv_to_rgb(rng.uniform(), rng.range(0.5, 1.0), 1.0);
    Plane {
        a,
        b,
        c: center - a * rc - b * cc,
        color,
    }
}

/// Bilinearly interpolated lattice of uniform values with spacing `cell`.
struct ValueNoise {
    cell: f64,
    cols: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut SceneRng, height: usize, width: usize, cell: f64) -> Self {
        let rows = (height as f64 / cell).ceil() as usize + 2;
        let cols = (width as f64 / cell).ceil() as usize + 2;
        let lattice = (0..rows * cols).map(|_| rng.uniform()).collect();
        Self { cell, cols, lattice }
    }

    fn at(&self, row: f64, col: f64) -> f64 {
        let (u, v) = (row / self.cell, col / self.cell);
        let (i, j) = (u.floor() as usize, v.floor() as usize);
        let (fu, fv) = (u - u.floor(), v - v.floor());
        let g = |r: usize, c: usize| self.lattice[r * self.cols + c];
        let top = g(i, j) * (1.0 - fv) + g(i, j + 1) * fv;
        let bottom = g(i + 1, j) * (1.0 - fv) + g(i + 1, j + 1) * fv;
        top * (1.0 - fu) + bottom * fu
    }
}

struct Spot {
    row: f64,
    col: f64,
    radius: f64,
}

/// Per-pixel intensity in `[0, 1]` for the chosen texture.
fn texture_field(spec: &SceneSpec, planes: &[Plane], labels: &Grid<u16>) -> Grid<f64> {
    let mut rng = SceneRng::new(spec.seed, STREAM_TEXTURE);
    let (h, w) = (spec.height, spec.width);
    match spec.texture {
        TextureKind::Noise => {
            let fine = ValueNoise::new(&mut rng, h, w, 2.0);
            let coarse = ValueNoise::new(&mut rng, h, w, 9.0);
            Grid::from_fn(h, w, |r, c| {
                0.65 * fine.at(r as f64, c as f64) + 0.35 * coarse.at(r as f64, c as f64)
            })
        }
        TextureKind::Gradient => {
            let dirs: Vec<(f64, f64)> = planes
                .iter()
                .map(|_| {
                    let t = rng.range(0.0, std::f64::consts::TAU);
                    (t.sin(), t.cos())
                })
                .collect();
            let diag = ((h * h + w * w) as f64).sqrt();
            Grid::from_fn(h, w, |r, c| {
                let (dr, dc) = dirs[labels.get(r, c) as usize];
                let t = (dr * r as f64 + dc * c as f64) / diag;
                0.6 + 0.4 * t.clamp(-1.0, 1.0)
            })
        }
        TextureKind::Checker => Grid::from_fn(h, w, |r, c| if (r / 8 + c / 8) % 2 == 0 { 1.0 } else { 0.4 }),
        TextureKind::Features => {
            let fine = ValueNoise::new(&mut rng, h, w, 1.5);
            let count = ((h * w) as f64 / 24_000.0).ceil() as usize;
            let spots: Vec<Spot> = (0..count)
                .map(|_| Spot {
                    row: rng.range(0.0, h as f64),
                    col: rng.range(0.0, w as f64),
                    radius: rng.range(7.0, 10.0),
                })
                .collect();
            let mut field = Grid::filled(h, w, 0.75);
            for s in &spots {
                let r0 = (s.row - s.radius).floor().max(0.0) as usize;
                let r1 = ((s.row + s.radius).ceil() as usize).min(h - 1);
                let c0 = (s.col - s.radius).floor().max(0.0) as usize;
                let c1 = ((s.col + s.radius).ceil() as usize).min(w - 1);
                for r in r0..=r1 {
                    for c in c0..=c1 {
                        let dist = (r as f64 - s.row).hypot(c as f64 - s.col);
                        if dist <= s.radius {
                            field.set(r, c, 0.2 + 0.8 * fine.at(r as f64, c as f64));
                        }
                    }
                }
            }
            field
        }
    }
}

/// Generates a mosaic of slanted planes and its textured left view.
///
/// Plane 0 covers the background; every further plane fills a random convex
/// polygon. Polygons are painted in order of increasing disparity so nearer
/// surfaces occlude farther ones. Each plane has its own hue, so color
/// changes mark plane boundaries. Plane parameters are drawn so the plane
/// stays inside `[d_min, d_max]` over the whole frame; the final clamp to
/// that range is therefore a no-op for generated planes.
pub fn gen_planar_scene<T: Scalar>(spec: &SceneSpec) -> Result<PlanarScene<T>> {
    spec.validate()?;
    let (h, w) = (spec.height, spec.width);
    let mut rng = SceneRng::new(spec.seed, STREAM_GEOMETRY);
    let background = random_plane(&mut rng, spec);
    let mut layers: Vec<(Plane, Polygon)> = (1..spec.planes)
        .map(|_| {
            let plane = random_plane(&mut rng, spec);
            let poly = Polygon::random(&mut rng, h, w);
            (plane, poly)
        })
        .collect();
    let (rc, cc) = ((h - 1) as f64 / 2.0, (w - 1) as f64 / 2.0);
    layers.sort_by(|a, b| a.0.eval(rc, cc).partial_cmp(&b.0.eval(rc, cc)).unwrap());

    let mut planes = vec![background];
    planes.extend(layers.iter().map(|(p, _)| *p));
    let labels = Grid::from_fn(h, w, |r, c| {
        layers
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (_, poly))| poly.contains(r as f64, c as f64))
            .map_or(0, |(i, _)| i as u16 + 1)
    });

    let disparity = Grid::from_fn(h, w, |r, c| {
        let d = planes[labels.get(r, c) as usize].eval(r as f64, c as f64);
        T::of(d.clamp(spec.d_min, spec.d_max))
    });
    if spec.texture == TextureKind::Features {
        for p in &mut planes {
            p.color = equal_luma(p.color);
        }
    }
    let intensity = texture_field(spec, &planes, &labels);
    let pixels = Grid::from_fn(h, w, |r, c| {
        let color = planes[labels.get(r, c) as usize].color;
        let v = 0.15 + 0.85 * intensity.get(r, c);
        color.map(|ch| T::of((ch * v).clamp(0.0, 1.0)))
    });
    Ok(PlanarScene {
        left: RgbImage::new(pixels)?,
        disparity: DisparityMap::from_values(disparity),
        planes,
        labels,
    })
}

fn sample_pixel<T: Scalar>(row: &[[T; 3]], col: f64) -> [T; 3] {
    let last = row.len() - 1;
    let col = col.clamp(0.0, last as f64);
    let i = (col.floor() as usize).min(last);
    let f = col - i as f64;
    if f == 0.0 || i == last {
        return row[i];
    }
    let (f, g) = (T::of(f), T::of(1.0 - f));
    [0, 1, 2].map(|k| row[i][k] * g + row[i + 1][k] * f)
}

/// Right view of a rectified pair: `right(x, y - d) = left(x, y)`.
///
/// Left pixels are splatted into the right view along each row, joining
/// neighbours whose disparities differ by at most one pixel into continuous
/// segments and keeping the largest disparity where segments overlap. Each
/// covered right pixel then samples the left row at `col + d` with linear
/// interpolation. Right pixels no segment reaches are disoccluded: they are
/// marked invalid in the returned mask and take the left row's color
/// mirrored about the row center, which carries texture without lining up
/// with any shift of the left row.
pub fn warp_right<T: Scalar>(left: &RgbImage<T>, gt: &DisparityMap<T>) -> Result<(RgbImage<T>, Grid<bool>)> {
    if left.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: left.dims(),
            actual: gt.dims(),
        });
    }
    let (h, w) = left.dims();
    let mut pixels = Vec::with_capacity(h * w);
    let mut mask = Vec::with_capacity(h * w);
    let mut depth = vec![f64::NEG_INFINITY; w];
    for r in 0..h {
        depth.iter_mut().for_each(|d| *d = f64::NEG_INFINITY);
        for c in 0..w.saturating_sub(1) {
            let (Some(d0), Some(d1)) = (gt.get(r, c), gt.get(r, c + 1)) else {
                continue;
            };
            let (d0, d1) = (d0.as_f64(), d1.as_f64());
            if (d1 - d0).abs() > 1.0 {
                continue;
            }
            let (p0, p1) = (c as f64 - d0, c as f64 + 1.0 - d1);
            let lo = p0.ceil().max(0.0);
            let hi = p1.floor().min((w - 1) as f64);
            if lo > hi {
                continue;
            }
            for yr in lo as usize..=hi as usize {
                let t = if p1 > p0 { (yr as f64 - p0) / (p1 - p0) } else { 0.0 };
                let d = d0 + t * (d1 - d0);
                if d > depth[yr] {
                    depth[yr] = d;
                }
            }
        }
        let row = left.pixels().row(r);
        for (yr, &d) in depth.iter().enumerate() {
            if d.is_finite() {
                pixels.push(sample_pixel(row, yr as f64 + d));
                mask.push(true);
            } else {
                pixels.push(row[w - 1 - yr]);
                mask.push(false);
            }
        }
    }
    Ok((RgbImage::new(Grid::from_vec(h, w, pixels)?)?, Grid::from_vec(h, w, mask)?))
}

/// Scharr gradient magnitude of a gray image (see the module docs).
pub fn gradient_magnitude<T: Scalar>(img: &GrayImage<T>) -> Grid<f64> {
    Grid::from_fn(img.height(), img.width(), |r, c| {
        let (r, c) = (r as isize, c as isize);
        let p = |dr: isize, dc: isize| img.get_clamped(r + dr, c + dc).as_f64();
        let gx = 3.0 * (p(-1, 1) - p(-1, -1)) + 10.0 * (p(0, 1) - p(0, -1)) + 3.0 * (p(1, 1) - p(1, -1));
        let gy = 3.0 * (p(1, -1) - p(-1, -1)) + 10.0 * (p(1, 0) - p(-1, 0)) + 3.0 * (p(1, 1) - p(-1, 1));
        gx.hypot(gy) / 32.0
    })
}

/// Draws `spec.hint_count()` gradient-weighted hints from `gt`, each
/// perturbed by Gaussian noise and floored at [`MIN_HINT`].
///
/// Only pixels with valid ground truth and a nonzero gradient are eligible.
pub fn sample_hints<T: Scalar>(gt: &DisparityMap<T>, img: &RgbImage<T>, spec: &SceneSpec) -> Result<HintMap<T>> {
    spec.validate()?;
    if gt.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: img.dims(),
        });
    }
    let (h, w) = gt.dims();
    let wanted = spec.hint_count();
    let weights = gradient_magnitude(&img.to_gray());
    let mut rng = SceneRng::new(spec.seed, STREAM_HINTS);
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for (i, &wt) in weights.as_slice().iter().enumerate() {
        let u = rng.uniform();
        if wt > 0.0 && gt.is_valid(i / w, i % w) {
            keys.push(((1.0 - u).ln() / wt, i));
        }
    }
    if wanted > keys.len() {
        return Err(Error::param(
            "density",
            format!("{wanted} hints requested but only {} pixels are eligible", keys.len()),
        ));
    }
    keys.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keys[..wanted].iter().map(|&(_, i)| i).collect();
    chosen.sort_unstable();

    let mut hints = HintMap::new(h, w);
    for i in chosen {
        let (r, c) = (i / w, i % w);
        let truth = gt.get(r, c).expect("eligible pixels have ground truth").as_f64();
        let noise = if spec.noise_sigma > 0.0 { spec.noise_sigma * rng.normal() } else { 0.0 };
        hints.set(r, c, T::of((truth + noise).max(MIN_HINT)))?;
    }
    Ok(hints)
}

/// Complete stereo fixture generated from one spec.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoScene<T> {
    pub scene: PlanarScene<T>,
    pub right: RgbImage<T>,
    pub right_valid: Grid<bool>,
    pub hints: HintMap<T>,
}

pub fn gen_stereo_scene<T: Scalar>(spec: &SceneSpec) -> Result<StereoScene<T>> {
    let scene = gen_planar_scene::<T>(spec)?;
    let (right, right_valid) = warp_right(&scene.left, &scene.disparity)?;
    let hints = sample_hints(&scene.disparity, &scene.left, spec)?;
    Ok(StereoScene {
        scene,
        right,
        right_valid,
        hints,
    })
}
