//! Parameter sets with their default values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordering applied to graph edges before rasterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortKey {
    /// 3D distance over `(row, col, disparity)`.
    #[default]
    Volumetric,
    /// 2D image-plane distance.
    Planar,
}

impl FromStr for SortKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3d" => Ok(SortKey::Volumetric),
            "2d" => Ok(SortKey::Planar),
            _ => Err(Error::param("sort_key", format!("expected `3d` or `2d`, got `{s}`"))),
        }
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortKey::Volumetric => "3d",
            SortKey::Planar => "2d",
        })
    }
}

/// Random geometric graph expansion settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams<T> {
    /// Radius of the 3D ball, in pixels (space and disparity mixed 1:1).
    pub radius: T,
    /// Minimum cosine similarity between endpoint colors, exclusive.
    pub color_tau: T,
    pub sort_key: SortKey,
}

impl<T: Scalar> Default for GraphParams<T> {
    fn default() -> Self {
        Self {
            radius: T::of(8.0),
            color_tau: T::of(0.9),
            sort_key: SortKey::Volumetric,
        }
    }
}

impl<T: Scalar> GraphParams<T> {
    pub fn with_radius(radius: T) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > T::zero()) || !self.radius.is_finite() {
            return Err(Error::param("radius", format!("must be finite and > 0, got {}", self.radius)));
        }
        if !(self.color_tau >= T::zero() && self.color_tau <= T::one()) {
            return Err(Error::param("color_tau", format!("must lie in [0, 1], got {}", self.color_tau)));
        }
        Ok(())
    }
}

/// How a row or column is filled from its knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillMode {
    /// Whole line: interpolate between knots and hold the end knots' values
    /// outside their span.
    #[default]
    Clamped,
    /// Only the cells between the first and last knot.
    Between,
}

impl FromStr for FillMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamped" => Ok(FillMode::Clamped),
            "between" => Ok(FillMode::Between),
            _ => Err(Error::param("fill_mode", format!("expected `clamped` or `between`, got `{s}`"))),
        }
    }
}

/// Patch-wise linear expansion settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearParams {
    /// Patch sides, applied in order.
    pub windows: Vec<usize>,
    pub fill_mode: FillMode,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self {
            windows: vec![8, 16],
            fill_mode: FillMode::Clamped,
        }
    }
}

impl LinearParams {
    pub fn validate(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::param("windows", "list must not be empty"));
        }
        if let Some(w) = self.windows.iter().find(|&&w| w < 2) {
            return Err(Error::param("windows", format!("every side must be >= 2, got {w}")));
        }
        Ok(())
    }
}

/// Direction of the epipolar shift used to look up the right-view feature
/// of a hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftSign {
    /// `col + disparity`.
    #[default]
    Plus,
    /// `col - disparity`, the usual convention for rectified pairs.
    Minus,
}

impl FromStr for ShiftSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(ShiftSign::Plus),
            "-" | "minus" => Ok(ShiftSign::Minus),
            _ => Err(Error::param("shift_sign", format!("expected `plus` or `minus`, got `{s}`"))),
        }
    }
}

/// Search range, cost-volume modulation and confidence settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceParams<T> {
    /// Relative margin around a hint.
    pub alpha: T,
    pub d_min: T,
    pub d_max: T,
    /// Peak height of the Gaussian modulation.
    pub k: T,
    /// Variance of the Gaussian modulation.
    pub c: T,
    pub conf_tau: T,
    pub shift_sign: ShiftSign,
}

impl<T: Scalar> Default for GuidanceParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::of(0.2),
            d_min: T::zero(),
            d_max: T::of(192.0),
            k: T::of(10.0),
            c: T::one(),
            conf_tau: T::of(0.9),
            shift_sign: ShiftSign::Plus,
        }
    }
}

impl<T: Scalar> GuidanceParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero() && self.alpha < T::one()) {
            return Err(Error::param("alpha", format!("must lie in [0, 1), got {}", self.alpha)));
        }
        if !(self.d_min >= T::zero() && self.d_min < self.d_max && self.d_max.is_finite()) {
            return Err(Error::param(
                "d_min/d_max",
                format!("need 0 <= d_min < d_max, got ({}, {})", self.d_min, self.d_max),
            ));
        }
        if !(self.k > T::zero()) {
            return Err(Error::param("k", format!("must be > 0, got {}", self.k)));
        }
        if !(self.c > T::zero()) {
            return Err(Error::param("c", format!("must be > 0, got {}", self.c)));
        }
        if !(self.conf_tau >= T::zero() && self.conf_tau <= T::one()) {
            return Err(Error::param("conf_tau", format!("must lie in [0, 1], got {}", self.conf_tau)));
        }
        Ok(())
    }
}

/// Per-dataset graph radius presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    SceneFlow,
    Tartan,
    Eth3d,
    Kitti,
}

impl Preset {
    pub fn radius(self) -> f64 {
        match self {
            Preset::SceneFlow => 8.0,
            Preset::Tartan => 25.0,
            Preset::Eth3d => 8.0,
            Preset::Kitti => 20.0,
        }
    }

    pub fn graph_params<T: Scalar>(self) -> GraphParams<T> {
        GraphParams::with_radius(T::of(self.radius()))
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sceneflow" => Ok(Preset::SceneFlow),
            "tartan" => Ok(Preset::Tartan),
            "eth3d" => Ok(Preset::Eth3d),
            "kitti" => Ok(Preset::Kitti),
            _ => Err(Error::param("preset", format!("unknown preset `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GraphParams::<f64>::default().validate().unwrap();
        LinearParams::default().validate().unwrap();
        GuidanceParams::<f32>::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(GraphParams::<f64>::with_radius(0.0).validate().is_err());
        let g = GraphParams { color_tau: 1.5, ..GraphParams::<f64>::default() };
        assert!(g.validate().is_err());
        assert!(LinearParams { windows: vec![8, 1], ..Default::default() }.validate().is_err());
        assert!(LinearParams { windows: vec![], ..Default::default() }.validate().is_err());
        let p = GuidanceParams { alpha: 1.0, ..GuidanceParams::<f64>::default() };
        assert!(p.validate().is_err());
        let p = GuidanceParams { d_min: 10.0, d_max: 10.0, ..GuidanceParams::<f64>::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn presets() {
        let r: Vec<f64> = ["sceneflow", "tartan", "eth3d", "kitti"]
            .iter()
            .map(|s| s.parse::<Preset>().unwrap().radius())
            .collect();
        assert_eq!(r, vec![8.0, 25.0, 8.0, 20.0]);
        assert!("middlebury".parse::<Preset>().is_err());
    }
}
