//! Shared raster types.
//!
//! Every raster is stored row-major and indexed `(row, col)`. Throughout the
//! crate `x` names the row and `y` the column, so a hint node sits at
//! `(x, y, disparity)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major 2D array.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::param(
                "data",
                format!("expected {} values for {height}x{width}, got {}", height * width, data.len()),
            ));
        }
        Ok(Self { height, width, data })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self { height, width, data }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    /// Bounds-checked access with signed coordinates.
    #[inline]
    pub fn get_checked(&self, row: isize, col: isize) -> Option<T> {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            None
        } else {
            Some(self.get(row as usize, col as usize))
        }
    }

    /// Access with coordinates clamped into the grid.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> T {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c)
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Copy> Index<(usize, usize)> for Grid<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.width + c]
    }
}

impl<T: Copy> IndexMut<(usize, usize)> for Grid<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.width + c]
    }
}

/// Single-channel intensity image.
pub type GrayImage<T> = Grid<T>;

/// Sparse disparity hints. A cell holding 0 carries no hint; any positive
/// value is a disparity in pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct HintMap<T> {
    grid: Grid<T>,
}

impl<T: Scalar> HintMap<T> {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            grid: Grid::filled(height, width, T::zero()),
        }
    }

    /// Wraps a grid as-is. Use [`validate_hint_map`] to diagnose bad values.
    pub fn from_grid(grid: Grid<T>) -> Self {
        Self { grid }
    }

    pub fn from_vec(height: usize, width: usize, values: Vec<T>) -> Result<Self> {
        Ok(Self {
            grid: Grid::from_vec(height, width, values)?,
        })
    }

    /// Builds a map from `(row, col, disparity)` triples.
    pub fn from_hints(
        height: usize,
        width: usize,
        hints: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut map = Self::new(height, width);
        for (r, c, d) in hints {
            map.set(r, c, d)?;
        }
        Ok(map)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.grid.height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.grid.width()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.grid.dims()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.grid.get(row, col)
    }

    #[inline]
    pub fn has_hint(&self, row: usize, col: usize) -> bool {
        self.grid.get(row, col) > T::zero()
    }

    /// Stores a hint, or clears the cell when `value` is 0.
    pub fn set(&mut self, row: usize, col: usize, value: T) -> Result<()> {
        if row >= self.height() || col >= self.width() {
            return Err(Error::InvalidValue {
                row,
                col,
                reason: format!("outside {}x{} map", self.height(), self.width()),
            });
        }
        if !value.is_finite() || value < T::zero() {
            return Err(Error::InvalidValue {
                row,
                col,
                reason: format!("hint {value} is not a finite non-negative disparity"),
            });
        }
        self.grid.set(row, col, value);
        Ok(())
    }

    pub(crate) fn put(&mut self, row: usize, col: usize, value: T) {
        self.grid.set(row, col, value);
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn into_grid(self) -> Grid<T> {
        self.grid
    }

    /// Number of cells carrying a hint.
    pub fn count(&self) -> usize {
        self.grid.as_slice().iter().filter(|&&v| v > T::zero()).count()
    }

    /// Hints in row-major order as `(row, col, disparity)`.
    pub fn iter_hints(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let w = self.width();
        self.grid
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > T::zero())
            .map(move |(i, &v)| (i / w, i % w, v))
    }

    /// Presence mask `H > 0`.
    pub fn presence(&self) -> Grid<bool> {
        self.grid.map(|v| v > T::zero())
    }

    pub fn density(&self) -> Result<f64> {
        density(self)
    }
}

/// Fraction of cells carrying a hint.
pub fn density<T: Scalar>(h: &HintMap<T>) -> Result<f64> {
    let area = h.height() * h.width();
    if area == 0 {
        return Err(Error::EmptyMap);
    }
    Ok(h.count() as f64 / area as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Finite,
    Positive,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Finite => f.write_str("values must be finite"),
            Rule::Positive => f.write_str("nonzero values must be positive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}): {}", self.row, self.col, self.rule)
    }
}

/// Lists every cell breaking the hint-map invariants, in row-major order.
pub fn validate_hint_map<T: Scalar>(h: &HintMap<T>) -> Vec<Violation> {
    let w = h.width();
    h.grid()
        .as_slice()
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| {
            let rule = if !v.is_finite() {
                Rule::Finite
            } else if v < T::zero() {
                Rule::Positive
            } else {
                return None;
            };
            Some(Violation {
                row: i / w,
                col: i % w,
                rule,
            })
        })
        .collect()
}

/// Dense disparity with a validity mask. Invalid pixels take no part in any
/// metric; their stored value is unspecified.
#[derive(Clone, Debug, PartialEq)]
pub struct DisparityMap<T> {
    values: Grid<T>,
    valid: Grid<bool>,
}

impl<T: Scalar> DisparityMap<T> {
    pub fn new(values: Grid<T>, valid: Grid<bool>) -> Result<Self> {
        if values.dims() != valid.dims() {
            return Err(Error::DimensionMismatch {
                expected: values.dims(),
                actual: valid.dims(),
            });
        }
        for r in 0..values.height() {
            for c in 0..values.width() {
                if valid.get(r, c) && !values.get(r, c).is_finite() {
                    return Err(Error::InvalidValue {
                        row: r,
                        col: c,
                        reason: "valid pixel carries a non-finite disparity".into(),
                    });
                }
            }
        }
        Ok(Self { values, valid })
    }

    /// Every finite value is valid.
    pub fn from_values(values: Grid<T>) -> Self {
        let valid = values.map(|v| v.is_finite());
        Self { values, valid }
    }

    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self::from_values(Grid::filled(height, width, value))
    }

    /// Hint cells become valid pixels, empty cells invalid.
    pub fn from_hints(h: &HintMap<T>) -> Self {
        Self {
            values: h.grid().clone(),
            valid: h.presence(),
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.values.height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.values.width()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        if self.valid.get(row, col) {
            Some(self.values.get(row, col))
        } else {
            None
        }
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid.get(row, col)
    }

    pub fn values(&self) -> &Grid<T> {
        &self.values
    }

    pub fn valid(&self) -> &Grid<bool> {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.as_slice().iter().filter(|&&v| v).count()
    }

    /// Marks one pixel invalid.
    pub fn invalidate(&mut self, row: usize, col: usize) {
        self.valid.set(row, col, false);
    }

    pub fn cast<U: Scalar>(&self) -> DisparityMap<U> {
        DisparityMap {
            values: self.values.map(|v| U::of(v.as_f64())),
            valid: self.valid.clone(),
        }
    }
}

/// Three-channel color image with channels normalized to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage<T> {
    pixels: Grid<[T; 3]>,
}

impl<T: Scalar> RgbImage<T> {
    pub fn new(pixels: Grid<[T; 3]>) -> Result<Self> {
        let w = pixels.width();
        for (i, px) in pixels.as_slice().iter().enumerate() {
            if px.iter().any(|&ch| !(ch >= T::zero() && ch <= T::one())) {
                return Err(Error::InvalidValue {
                    row: i / w,
                    col: i % w,
                    reason: "color channel outside [0, 1]".into(),
                });
            }
        }
        Ok(Self { pixels })
    }

    /// Interleaved 8-bit RGB, divided by 255.
    pub fn from_rgb8(height: usize, width: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != height * width * 3 {
            return Err(Error::param(
                "bytes",
                format!("expected {} bytes, got {}", height * width * 3, bytes.len()),
            ));
        }
        let scale = T::of(255.0);
        let data = bytes
            .chunks_exact(3)
            .map(|p| [T::of(p[0] as f64) / scale, T::of(p[1] as f64) / scale, T::of(p[2] as f64) / scale])
            .collect();
        Ok(Self {
            pixels: Grid::from_vec(height, width, data)?,
        })
    }

    /// Replicates a gray image into three channels.
    pub fn from_gray(gray: &GrayImage<T>) -> Result<Self> {
        Self::new(gray.map(|v| [v, v, v]))
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.pixels.height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.pixels.width()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.pixels.dims()
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> [T; 3] {
        self.pixels.get(row, col)
    }

    pub fn pixels(&self) -> &Grid<[T; 3]> {
        &self.pixels
    }

    /// Rec. 601 luma.
    pub fn to_gray(&self) -> GrayImage<T> {
        let (wr, wg, wb) = (T::of(0.299), T::of(0.587), T::of(0.114));
        self.pixels.map(|[r, g, b]| wr * r + wg * g + wb * b)
    }

    /// Interleaved 8-bit RGB, `round(255 * v)`.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels
            .as_slice()
            .iter()
            .flat_map(|px| px.map(|ch| (ch.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8))
            .collect()
    }
}
