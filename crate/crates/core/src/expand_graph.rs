//! Hint expansion over a 3D random geometric graph.
//!
//! Every hint becomes a node at `(row, col, disparity)`. Two nodes are joined
//! when they are closer than the radius in that space and their left-image
//! colors have cosine similarity above the threshold. Edges are processed
//! shortest first; each one rasterizes the slanted segment between its
//! endpoints into cells that are still empty, so original hints and earlier
//! (shorter, more trustworthy) edges are never overwritten.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::params::{GraphParams, SortKey};
use crate::scalar::Scalar;
use crate::types::{HintMap, RgbImage};

/// Edges whose endpoints are at most this far apart in 2D have no cell
/// strictly between them and are skipped.
pub const ADJACENT_LIMIT: f64 = std::f64::consts::SQRT_2 + 1e-9;

const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HintNode<T> {
    /// Row.
    pub x: usize,
    /// Column.
    pub y: usize,
    /// Disparity.
    pub z: T,
    pub color: [T; 3],
}

/// Graph edge between nodes `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub i: usize,
    pub j: usize,
    /// Euclidean distance over `(row, col, disparity)`.
    pub d3: T,
    /// Euclidean distance over `(row, col)`.
    pub d2: T,
}

/// Nodes for every hint of `h`, in row-major order, colored from `img`.
pub fn hint_nodes<T: Scalar>(h: &HintMap<T>, img: &RgbImage<T>) -> Result<Vec<HintNode<T>>> {
    if h.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: h.dims(),
            actual: img.dims(),
        });
    }
    Ok(h.iter_hints()
        .map(|(x, y, z)| HintNode {
            x,
            y,
            z,
            color: img.pixel(x, y),
        })
        .collect())
}

/// Cosine similarity of two colors. Two (near) black colors count as
/// identical; otherwise each norm is padded by `1e-12`.
pub fn cosine_similarity<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    let eps = T::of(NORM_EPS);
    let norm = |v: &[T; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na < eps && nb < eps {
        return T::one();
    }
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    dot / ((na + eps) * (nb + eps))
}

/// The edge between `a` and `b` if it passes both the radius and the color
/// test.
fn candidate_edge<T: Scalar>(
    i: usize,
    j: usize,
    a: &HintNode<T>,
    b: &HintNode<T>,
    params: &GraphParams<T>,
) -> Option<Edge<T>> {
    let dx = T::of_usize(a.x) - T::of_usize(b.x);
    let dy = T::of_usize(a.y) - T::of_usize(b.y);
    let dz = a.z - b.z;
    let planar = dx * dx + dy * dy;
    let d3 = (planar + dz * dz).sqrt();
    if !(d3 < params.radius) {
        return None;
    }
    if !(cosine_similarity(&a.color, &b.color) > params.color_tau) {
        return None;
    }
    Some(Edge {
        i,
        j,
        d3,
        d2: planar.sqrt(),
    })
}

/// All node pairs with `d3 < radius` and color similarity `> color_tau`,
/// found with a uniform grid over the image plane.
///
/// Returned edges have `i < j`; their order is unspecified until passed
/// through [`sort_edges`].
pub fn build_edges<T: Scalar>(nodes: &[HintNode<T>], params: &GraphParams<T>) -> Vec<Edge<T>> {
    if nodes.len() < 2 {
        return Vec::new();
    }
    // d2 <= d3 < radius, so partners always sit in the 3x3 block of cells.
    let cell = params.radius.ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let rows = nodes.iter().map(|n| n.x).max().unwrap_or(0) / cell + 1;
    let cols = nodes.iter().map(|n| n.y).max().unwrap_or(0) / cell + 1;

    // Counting sort of node ids by cell.
    let cell_of = |n: &HintNode<T>| (n.x / cell) * cols + n.y / cell;
    let mut starts = vec![0usize; rows * cols + 1];
    for n in nodes {
        starts[cell_of(n) + 1] += 1;
    }
    for k in 1..starts.len() {
        starts[k] += starts[k - 1];
    }
    let mut fill = starts.clone();
    let mut order = vec![0usize; nodes.len()];
    for (id, n) in nodes.iter().enumerate() {
        let c = cell_of(n);
        order[fill[c]] = id;
        fill[c] += 1;
    }

    let mut edges = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        let (cr, cc) = (a.x / cell, a.y / cell);
        for r in cr.saturating_sub(1)..=(cr + 1).min(rows - 1) {
            for c in cc.saturating_sub(1)..=(cc + 1).min(cols - 1) {
                let k = r * cols + c;
                for &j in &order[starts[k]..starts[k + 1]] {
                    if j > i {
                        if let Some(e) = candidate_edge(i, j, a, &nodes[j], params) {
                            edges.push(e);
                        }
                    }
                }
            }
        }
    }
    edges
}

/// Ascending by the chosen distance; ties broken by `(i, j)`.
pub fn sort_edges<T: Scalar>(mut edges: Vec<Edge<T>>, key: SortKey) -> Vec<Edge<T>> {
    let dist = |e: &Edge<T>| match key {
        SortKey::Volumetric => e.d3,
        SortKey::Planar => e.d2,
    };
    edges.sort_by(|a, b| {
        dist(a)
            .partial_cmp(&dist(b))
            .unwrap_or(Ordering::Equal)
            .then_with(|| (a.i.min(a.j), a.i.max(a.j)).cmp(&(b.i.min(b.j), b.i.max(b.j))))
    });
    edges
}

/// Writes the slanted segment from `a` to `b` into the empty cells of `h`.
///
/// Steps `m = 1, 2, ...` while `m < d2` along the unit direction
/// `(b - a) / d2`; step `m` lands on the cell nearest to `a + m * dir`
/// (halves round away from zero) and, if that cell is in bounds and empty,
/// stores `z_a + (z_b - z_a) * m / d2`. Pairs with `d2 <= sqrt(2)` have no
/// intermediate cell and leave `h` untouched.
///
/// Returns the number of cells written.
pub fn rasterize_edge<T: Scalar>(h: &mut HintMap<T>, a: &HintNode<T>, b: &HintNode<T>) -> usize {
    let dx = T::of_usize(b.x) - T::of_usize(a.x);
    let dy = T::of_usize(b.y) - T::of_usize(a.y);
    let d2 = (dx * dx + dy * dy).sqrt();
    if d2 <= T::of(ADJACENT_LIMIT) {
        return 0;
    }
    let (ux, uy) = (dx / d2, dy / d2);
    let (lo, hi) = if a.z <= b.z { (a.z, b.z) } else { (b.z, a.z) };
    let (ax, ay) = (T::of_usize(a.x), T::of_usize(a.y));
    let (height, width) = (h.height() as isize, h.width() as isize);
    let steps = d2.ceil().to_usize().unwrap_or(0).saturating_sub(1);

    let mut written = 0;
    for m in 1..=steps {
        let t = T::of_usize(m);
        let r = (ax + t * ux).round().to_isize().unwrap_or(-1);
        let c = (ay + t * uy).round().to_isize().unwrap_or(-1);
        if r < 0 || c < 0 || r >= height || c >= width {
            continue;
        }
        let (r, c) = (r as usize, c as usize);
        if h.get(r, c) != T::zero() {
            continue;
        }
        let z = (a.z + (b.z - a.z) * (t / d2)).max(lo).min(hi);
        h.put(r, c, z);
        written += 1;
    }
    written
}

/// Expands `h` along the sorted edges of its color-gated radius graph.
///
/// Each edge is rasterized from its lower-index endpoint (row-major order
/// of the hints) towards the higher one.
pub fn expand_graph<T: Scalar>(
    h: &HintMap<T>,
    img: &RgbImage<T>,
    params: &GraphParams<T>,
) -> Result<HintMap<T>> {
    params.validate()?;
    let nodes = hint_nodes(h, img)?;
    let edges = sort_edges(build_edges(&nodes, params), params.sort_key);
    let mut out = h.clone();
    for e in &edges {
        if e.d2.as_f64() <= ADJACENT_LIMIT {
            continue;
        }
        rasterize_edge(&mut out, &nodes[e.i], &nodes[e.j]);
    }
    Ok(out)
}
