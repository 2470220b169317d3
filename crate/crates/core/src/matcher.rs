//! Winner-take-all block matcher whose per-pixel candidates come from a
//! [`GuidanceRange`].
//!
//! There is no aggregation or smoothing: the only difference between a
//! guided and an unguided run is the candidate set, so any accuracy change
//! is attributable to the hints.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::guidance::{compute_range, linspace, GuidanceRange};
use crate::params::GuidanceParams;
use crate::scalar::Scalar;
use crate::types::{DisparityMap, GrayImage, Grid, HintMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostKind {
    /// Sum of absolute differences.
    #[default]
    Sad,
    /// `1 - ZNCC`; flat windows score 1.
    Zncc,
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sad" => Ok(CostKind::Sad),
            "zncc" => Ok(CostKind::Zncc),
            _ => Err(Error::param("cost", format!("expected `sad` or `zncc`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams<T> {
    /// Half side of the square block; 2 gives a 5x5 block.
    pub block_radius: usize,
    /// Candidates evaluated per pixel.
    pub candidates: usize,
    pub cost: CostKind,
    pub guidance: GuidanceParams<T>,
}

impl<T: Scalar> Default for MatchParams<T> {
    fn default() -> Self {
        Self {
            block_radius: 2,
            candidates: 16,
            cost: CostKind::Sad,
            guidance: GuidanceParams::default(),
        }
    }
}

impl<T: Scalar> MatchParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.block_radius < 1 {
            return Err(Error::param("block_radius", "must be >= 1"));
        }
        if self.candidates < 2 {
            return Err(Error::param("candidates", "must be >= 2"));
        }
        self.guidance.validate()
    }
}

/// Row sample at a fractional column, linearly interpolated, clamped to the
/// row ends.
#[inline]
fn sample_row<T: Scalar>(row: &[T], col: T) -> T {
    let last = row.len() - 1;
    let col = col.max(T::zero()).min(T::of_usize(last));
    let base = col.floor();
    let i = base.to_usize().unwrap_or(0).min(last);
    let frac = col - base;
    if frac == T::zero() || i == last {
        row[i]
    } else {
        row[i] * (T::one() - frac) + row[i + 1] * frac
    }
}

/// Block dissimilarity between the left block centered at `(row, col)` and
/// the right block centered at `(row, col - d)`.
///
/// Blocks are sampled with clamped borders; a right block lying entirely
/// outside the image costs `+inf`.
pub fn match_cost<T: Scalar>(
    left: &GrayImage<T>,
    right: &GrayImage<T>,
    row: usize,
    col: usize,
    d: T,
    params: &MatchParams<T>,
) -> T {
    let r = params.block_radius as isize;
    let width = right.width() as isize;
    let center = T::of_usize(col) - d;
    let rf = T::of(r as f64);
    if center + rf < T::zero() || center - rf > T::of((width - 1) as f64) {
        return T::infinity();
    }
    let n = ((2 * r + 1) * (2 * r + 1)) as usize;
    let mut sum = T::zero();
    let (mut sl, mut sr, mut sll, mut srr, mut slr) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for dr in -r..=r {
        let rr = (row as isize + dr).clamp(0, left.height() as isize - 1) as usize;
        let right_row = right.row(rr);
        for dc in -r..=r {
            let l = left.get_clamped(rr as isize, col as isize + dc);
            let rv = sample_row(right_row, center + T::of(dc as f64));
            match params.cost {
                CostKind::Sad => sum = sum + (l - rv).abs(),
                CostKind::Zncc => {
                    sl = sl + l;
                    sr = sr + rv;
                    sll = sll + l * l;
                    srr = srr + rv * rv;
                    slr = slr + l * rv;
                }
            }
        }
    }
    match params.cost {
        CostKind::Sad => sum,
        CostKind::Zncc => {
            let nf = T::of_usize(n);
            let cov = slr - sl * sr / nf;
            let vl = sll - sl * sl / nf;
            let vr = srr - sr * sr / nf;
            let eps = T::of(1e-12);
            if vl <= eps || vr <= eps {
                T::one()
            } else {
                T::one() - cov / (vl * vr).sqrt()
            }
        }
    }
}

/// Winner-take-all over candidates spread evenly across each pixel's range.
/// Ties resolve to the smaller disparity.
pub fn match_with_range<T: Scalar>(
    left: &GrayImage<T>,
    right: &GrayImage<T>,
    range: &GuidanceRange<T>,
    params: &MatchParams<T>,
) -> Result<DisparityMap<T>> {
    params.validate()?;
    if left.dims() != right.dims() {
        return Err(Error::DimensionMismatch {
            expected: left.dims(),
            actual: right.dims(),
        });
    }
    if range.dims() != left.dims() {
        return Err(Error::DimensionMismatch {
            expected: left.dims(),
            actual: range.dims(),
        });
    }
    let (height, width) = left.dims();
    let rows: Vec<Vec<T>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|col| {
                    let (low, high) = range.bounds(row, col);
                    let mut best = (T::infinity(), low);
                    for d in linspace(low, high, params.candidates) {
                        let cost = match_cost(left, right, row, col, d, params);
                        if cost < best.0 {
                            best = (cost, d);
                        }
                    }
                    best.1
                })
                .collect()
        })
        .collect();
    let values = Grid::from_vec(height, width, rows.into_iter().flatten().collect())?;
    Ok(DisparityMap::from_values(values))
}

/// Matches with candidates drawn from the hint-derived search range.
pub fn guided_match<T: Scalar>(
    left: &GrayImage<T>,
    right: &GrayImage<T>,
    h: &HintMap<T>,
    params: &MatchParams<T>,
) -> Result<DisparityMap<T>> {
    if h.dims() != left.dims() {
        return Err(Error::DimensionMismatch {
            expected: left.dims(),
            actual: h.dims(),
        });
    }
    let range = compute_range(h, &params.guidance)?;
    match_with_range(left, right, &range, params)
}

/// Full-range matching with the same candidate count.
pub fn baseline_match<T: Scalar>(
    left: &GrayImage<T>,
    right: &GrayImage<T>,
    params: &MatchParams<T>,
) -> Result<DisparityMap<T>> {
    guided_match(left, right, &HintMap::new(left.height(), left.width()), params)
}
