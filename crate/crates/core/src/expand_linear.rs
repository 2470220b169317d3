//! Patch-wise linear expansion.
//!
//! The map is cut into non-overlapping `W x W` tiles starting at the top-left
//! corner; the ragged right and bottom remainders are left untouched. Inside
//! a tile with at least three hints, every row holding two or more hints is
//! re-sampled as the piecewise-linear curve through them, then every column
//! of the result is treated the same way. Each tile goes through this twice
//! so vertical fills can seed new horizontal knots.

use crate::error::{Error, Result};
use crate::params::{FillMode, LinearParams};
use crate::scalar::Scalar;
use crate::types::HintMap;

/// Square tile copied out of a hint map.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch<T> {
    /// Top-left `(row, col)` in the source map.
    pub origin: (usize, usize),
    pub side: usize,
    cells: Vec<T>,
}

impl<T: Scalar> Patch<T> {
    /// Copies the `side x side` tile at `origin`; `None` if it does not fit.
    pub fn extract(h: &HintMap<T>, origin: (usize, usize), side: usize) -> Option<Self> {
        let (r0, c0) = origin;
        if side == 0 || r0 + side > h.height() || c0 + side > h.width() {
            return None;
        }
        let mut cells = Vec::with_capacity(side * side);
        for r in r0..r0 + side {
            cells.extend_from_slice(&h.grid().row(r)[c0..c0 + side]);
        }
        Some(Self { origin, side, cells })
    }

    pub fn from_cells(side: usize, cells: Vec<T>) -> Result<Self> {
        if cells.len() != side * side {
            return Err(Error::param("cells", format!("expected {} cells, got {}", side * side, cells.len())));
        }
        Ok(Self {
            origin: (0, 0),
            side,
            cells,
        })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[row * self.side + col]
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&v| v > T::zero()).count()
    }

    /// Copies the tile back into `h` at its origin.
    pub fn write_into(&self, h: &mut HintMap<T>) {
        let (r0, c0) = self.origin;
        for r in 0..self.side {
            for c in 0..self.side {
                h.put(r0 + r, c0 + c, self.get(r, c));
            }
        }
    }
}

/// Re-samples `line` through its positive cells. Returns `false` (leaving
/// `line` as it was) when it has fewer than two knots.
///
/// Between knots `k` and `k+1` a cell `i` gets `slope * (i - k) + v_k`, so
/// knots keep their exact values.
fn interpolate_line<T: Scalar>(line: &mut [T], knots: &mut Vec<usize>, mode: FillMode) -> bool {
    knots.clear();
    knots.extend(line.iter().enumerate().filter(|(_, &v)| v > T::zero()).map(|(i, _)| i));
    if knots.len() < 2 {
        return false;
    }
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if mode == FillMode::Clamped {
        let (v0, vn) = (line[first], line[last]);
        line[..first].iter_mut().for_each(|v| *v = v0);
        line[last + 1..].iter_mut().for_each(|v| *v = vn);
    }
    for pair in knots.windows(2) {
        let (k0, k1) = (pair[0], pair[1]);
        let (v0, v1) = (line[k0], line[k1]);
        let slope = (v1 - v0) / T::of_usize(k1 - k0);
        for i in k0 + 1..k1 {
            line[i] = slope * T::of_usize(i - k0) + v0;
        }
    }
    true
}

/// One horizontal-then-vertical densification of a tile.
///
/// Tiles with fewer than three hints are returned unchanged.
pub fn densify_patch<T: Scalar>(p: &Patch<T>, mode: FillMode) -> Patch<T> {
    let mut out = p.clone();
    if p.count() < 3 {
        return out;
    }
    let n = p.side;
    let mut knots = Vec::with_capacity(n);
    for row in out.cells.chunks_exact_mut(n) {
        interpolate_line(row, &mut knots, mode);
    }
    let mut column = vec![T::zero(); n];
    for c in 0..n {
        for r in 0..n {
            column[r] = out.cells[r * n + c];
        }
        if interpolate_line(&mut column, &mut knots, mode) {
            for r in 0..n {
                out.cells[r * n + c] = column[r];
            }
        }
    }
    out
}

/// Applies the double tile densification to every complete `window x window`
/// tile of `h`.
pub fn expand_linear<T: Scalar>(h: &HintMap<T>, window: usize, mode: FillMode) -> Result<HintMap<T>> {
    if window < 2 {
        return Err(Error::param("window", format!("must be >= 2, got {window}")));
    }
    let mut out = h.clone();
    for i in 0..h.height() / window {
        for j in 0..h.width() / window {
            let Some(tile) = Patch::extract(h, (i * window, j * window), window) else {
                continue;
            };
            densify_patch(&densify_patch(&tile, mode), mode).write_into(&mut out);
        }
    }
    Ok(out)
}

/// [`expand_linear`] once per window, in order.
pub fn expand_linear_multi<T: Scalar>(h: &HintMap<T>, params: &LinearParams) -> Result<HintMap<T>> {
    params.validate()?;
    params
        .windows
        .iter()
        .try_fold(h.clone(), |acc, &w| expand_linear(&acc, w, params.fill_mode))
}
