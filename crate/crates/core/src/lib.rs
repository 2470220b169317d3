//! Densification of sparse, unevenly distributed disparity hints.
//!
//! Hints are lifted into `(row, col, disparity)` space and expanded either
//! patch-wise along rows and columns ([`expand_linear`]) or along the edges
//! of a color-gated random geometric graph ([`expand_graph`]). The expanded
//! hints drive per-pixel search ranges, cost-volume modulation and a
//! confidence filter ([`guidance`]), a guided block matcher ([`matcher`]),
//! and an evaluation toolkit built on seeded synthetic scenes ([`synth`],
//! [`metrics`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root name the common concrete instantiations.

pub mod error;
pub mod expand_graph;
pub mod expand_linear;
pub mod guidance;
pub mod io;
pub mod matcher;
pub mod metrics;
pub mod params;
pub mod scalar;
pub mod synth;
pub mod types;

pub use error::{Error, Location, Result};
pub use expand_graph::{build_edges, expand_graph, rasterize_edge, sort_edges, Edge, HintNode};
pub use expand_linear::{densify_patch, expand_linear, expand_linear_multi, Patch};
pub use params::{
    FillMode, GraphParams, GuidanceParams, LinearParams, Preset, ShiftSign, SortKey,
};
pub use scalar::Scalar;
pub use types::{
    density, validate_hint_map, DisparityMap, GrayImage, Grid, HintMap, RgbImage, Rule, Violation,
};

/// Default scalar used by the CLI and file readers.
pub type Real = f64;

pub type HintMapF32 = HintMap<f32>;
pub type HintMapF64 = HintMap<f64>;
pub type DisparityMapF32 = DisparityMap<f32>;
pub type DisparityMapF64 = DisparityMap<f64>;
pub type RgbImageF32 = RgbImage<f32>;
pub type RgbImageF64 = RgbImage<f64>;
pub type GrayImageF32 = GrayImage<f32>;
pub type GrayImageF64 = GrayImage<f64>;
pub type GraphParamsF64 = GraphParams<f64>;
pub type GuidanceParamsF64 = GuidanceParams<f64>;
