//! Reference implementations and random instance generators shared by the
//! integration tests. The references work on plain `Vec<f64>` rasters and
//! share no code with the library beyond the RNG used to draw inputs.
#![allow(dead_code)]

use densify::synth::SceneRng;
use densify::{DisparityMap, FillMode, Grid, HintMap, RgbImage};

/// Dense row-major raster, 0 = empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub height: usize,
    pub width: usize,
    pub cells: Vec<f64>,
}

impl Raster {
    pub fn from_hints(h: &HintMap<f64>) -> Self {
        Self { height: h.height(), width: h.width(), cells: h.grid().as_slice().to_vec() }
    }

    pub fn max_abs_diff(&self, h: &HintMap<f64>) -> f64 {
        assert_eq!((self.height, self.width), h.dims());
        self.cells
            .iter()
            .zip(h.grid().as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Graph expansion reference: all pairs, filter, sort, rasterize.

#[derive(Debug, Clone)]
pub struct GraphInstance {
    pub hints: HintMap<f64>,
    pub image: RgbImage<f64>,
    pub radius: f64,
    pub tau: f64,
    pub planar_sort: bool,
}

/// Cell written by the reference together with the endpoints' disparities.
#[derive(Debug, Clone, Copy)]
pub struct Fill {
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub za: f64,
    pub zb: f64,
}

pub fn graph_reference(inst: &GraphInstance) -> (Raster, Vec<Fill>) {
    let mut out = Raster::from_hints(&inst.hints);
    let (h, w) = (out.height, out.width);
    let pts: Vec<(f64, f64, f64, [f64; 3])> = (0..h * w)
        .filter(|&i| out.cells[i] > 0.0)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            (r as f64, c as f64, out.cells[i], inst.image.pixel(r, c))
        })
        .collect();

    let cosine = |a: [f64; 3], b: [f64; 3]| {
        let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if na < 1e-12 && nb < 1e-12 {
            1.0
        } else {
            (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / ((na + 1e-12) * (nb + 1e-12))
        }
    };

    // (key, i, j, d2)
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i >= j {
                continue;
            }
            let (a, b) = (pts[i], pts[j]);
            let d2 = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            let d3 = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt();
            if d3 < inst.radius && cosine(a.3, b.3) > inst.tau {
                edges.push((if inst.planar_sort { d2 } else { d3 }, i, j, d2));
            }
        }
    }
    edges.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut fills = Vec::new();
    for (_, i, j, d2) in edges {
        if d2 <= 2f64.sqrt() + 1e-9 {
            continue;
        }
        let (a, b) = (pts[i], pts[j]);
        let mut m = 1.0;
        while m < d2 {
            let r = (a.0 + m * (b.0 - a.0) / d2).round();
            let c = (a.1 + m * (b.1 - a.1) / d2).round();
            if r >= 0.0 && c >= 0.0 && (r as usize) < h && (c as usize) < w {
                let k = r as usize * w + c as usize;
                if out.cells[k] == 0.0 {
                    let v = (a.2 + (b.2 - a.2) * m / d2).clamp(a.2.min(b.2), a.2.max(b.2));
                    out.cells[k] = v;
                    fills.push(Fill { row: r as usize, col: c as usize, value: v, za: a.2, zb: b.2 });
                }
            }
            m += 1.0;
        }
    }
    (out, fills)
}

/// Small random graph instance: at most 16 hints on at most 64x64, a few
/// color clusters so both sides of the color gate occur.
pub fn random_graph_instance(seed: u64) -> GraphInstance {
    let mut rng = SceneRng::new(seed, 7);
    let height = rng.int(1, 64);
    let width = rng.int(1, 64);
    let n = rng.int(0, 16.min(height * width));
    // Clustered placement keeps many pairs within the radius.
    let (cr, cc) = (rng.int(0, height - 1), rng.int(0, width - 1));
    let spread = rng.int(2, 20);
    let mut hints = HintMap::new(height, width);
    let mut placed = 0;
    let mut tries = 0;
    while placed < n && tries < 10_000 {
        tries += 1;
        let r = (cr as isize + rng.int(0, 2 * spread) as isize - spread as isize).clamp(0, height as isize - 1) as usize;
        let c = (cc as isize + rng.int(0, 2 * spread) as isize - spread as isize).clamp(0, width as isize - 1) as usize;
        if hints.has_hint(r, c) {
            continue;
        }
        let z = if rng.uniform() < 0.2 { rng.int(1, 30) as f64 } else { rng.range(0.5, 30.0) };
        hints.set(r, c, z).unwrap();
        placed += 1;
    }
    let palette = [[0.8, 0.2, 0.1], [0.75, 0.25, 0.12], [0.1, 0.3, 0.9], [0.0, 0.0, 0.0], [0.5, 0.5, 0.5]];
    let pixels = Grid::from_fn(height, width, |_, _| palette[rng.int(0, palette.len() - 1)]);
    GraphInstance {
        hints,
        image: RgbImage::new(pixels).unwrap(),
        radius: rng.range(1.0, 24.0),
        tau: [0.0, 0.5, 0.9, 0.99, rng.uniform()][rng.int(0, 4)],
        planar_sort: rng.uniform() < 0.25,
    }
}

// ---------------------------------------------------------------------------
// Linear expansion reference: a line-for-line port of the NumPy
// `dense_patch` / `patch_iter` routines.

/// `numpy.interp` for increasing `xp`: clamped at both ends, piecewise
/// linear in between.
pub fn np_interp(x: f64, xp: &[f64], fp: &[f64]) -> f64 {
    let n = xp.len();
    if x <= xp[0] {
        return fp[0];
    }
    if x >= xp[n - 1] {
        return fp[n - 1];
    }
    // Largest j with xp[j] <= x.
    let j = xp.partition_point(|&v| v <= x) - 1;
    let slope = (fp[j + 1] - fp[j]) / (xp[j + 1] - xp[j]);
    slope * (x - xp[j]) + fp[j]
}

/// Restricted variant: outside the knot span the line keeps its old value.
fn interp_between(x: f64, old: f64, xp: &[f64], fp: &[f64]) -> f64 {
    if x < xp[0] || x > xp[xp.len() - 1] {
        old
    } else {
        np_interp(x, xp, fp)
    }
}

fn count_nonzero(v: &[f64]) -> usize {
    v.iter().filter(|&&x| x != 0.0).count()
}

/// `dense_patch` on a square `n x n` patch stored row-major.
pub fn dense_patch(patch: &[f64], n: usize, mode: FillMode) -> Vec<f64> {
    let mut new_patch = patch.to_vec();
    if count_nonzero(patch) >= 3 {
        for u in 0..n {
            let line = &patch[u * n..(u + 1) * n];
            if count_nonzero(line) >= 2 {
                let xp: Vec<f64> = (0..n).filter(|&i| patch[u * n + i] > 0.0).map(|i| i as f64).collect();
                let fp: Vec<f64> = xp.iter().map(|&i| patch[u * n + i as usize]).collect();
                for i in 0..n {
                    new_patch[u * n + i] = match mode {
                        FillMode::Clamped => np_interp(i as f64, &xp, &fp),
                        FillMode::Between => interp_between(i as f64, new_patch[u * n + i], &xp, &fp),
                    };
                }
            }
        }
        for v in 0..n {
            let line: Vec<f64> = (0..n).map(|i| new_patch[i * n + v]).collect();
            if count_nonzero(&line) >= 2 {
                let xp: Vec<f64> = (0..n).filter(|&i| line[i] > 0.0).map(|i| i as f64).collect();
                let fp: Vec<f64> = xp.iter().map(|&i| line[i as usize]).collect();
                for i in 0..n {
                    new_patch[i * n + v] = match mode {
                        FillMode::Clamped => np_interp(i as f64, &xp, &fp),
                        FillMode::Between => interp_between(i as f64, line[i], &xp, &fp),
                    };
                }
            }
        }
    }
    new_patch
}

/// `patch_iter` for one window side.
pub fn patch_iter(hints: &Raster, win: usize, mode: FillMode) -> Raster {
    let (h, w) = (hints.height, hints.width);
    let mut new = hints.clone();
    for i in 0..h / win {
        for j in 0..w / win {
            let mut window = Vec::with_capacity(win * win);
            for r in win * i..win * (i + 1) {
                window.extend_from_slice(&hints.cells[r * w + win * j..r * w + win * (j + 1)]);
            }
            let dense = dense_patch(&dense_patch(&window, win, mode), win, mode);
            for r in 0..win {
                for c in 0..win {
                    new.cells[(win * i + r) * w + win * j + c] = dense[r * win + c];
                }
            }
        }
    }
    new
}

pub fn linear_reference(hints: &HintMap<f64>, windows: &[usize], mode: FillMode) -> Raster {
    windows.iter().fold(Raster::from_hints(hints), |acc, &win| patch_iter(&acc, win, mode))
}

#[derive(Debug, Clone)]
pub struct LinearInstance {
    pub hints: HintMap<f64>,
    pub windows: Vec<usize>,
    pub mode: FillMode,
}

/// Random map up to 128x128 with a random density and window list.
pub fn random_linear_instance(seed: u64) -> LinearInstance {
    let mut rng = SceneRng::new(seed, 11);
    let height = rng.int(1, 128);
    let width = rng.int(1, 128);
    let density = [0.005, 0.02, 0.05, 0.15, 0.4][rng.int(0, 4)];
    let integer = rng.uniform() < 0.3;
    let hints = HintMap::from_grid(Grid::from_fn(height, width, |_, _| {
        if rng.uniform() < density {
            if integer { rng.int(1, 100) as f64 } else { rng.range(0.01, 100.0) }
        } else {
            0.0
        }
    }));
    let windows = match rng.int(0, 4) {
        0 | 1 => vec![8, 16],
        2 => vec![rng.int(2, 40)],
        3 => vec![16, 8],
        _ => (0..rng.int(1, 3)).map(|_| rng.int(2, 24)).collect(),
    };
    let mode = if rng.uniform() < 0.8 { FillMode::Clamped } else { FillMode::Between };
    LinearInstance { hints, windows, mode }
}

// ---------------------------------------------------------------------------
// Malformed inputs: each entry is (file name, bytes); the extension selects
// the reader. Hint files are read as 4x4 maps.

pub fn malformed_corpus() -> Vec<(&'static str, Vec<u8>)> {
    let pfm = |header: &str, payload: &[f32]| {
        let mut b = header.as_bytes().to_vec();
        for v in payload {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    };
    let mut truncated = pfm("Pf\n2 2\n-1.0\n", &[1.0, 2.0, 3.0, 4.0]);
    truncated.truncate(truncated.len() - 3);
    let mut trailing = pfm("Pf\n2 1\n-1.0\n", &[1.0, 2.0]);
    trailing.extend_from_slice(b"xx");

    let rgb_png = {
        let mut buf = Vec::new();
        let mut enc = png::Encoder::new(&mut buf, 2, 1);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header().unwrap().write_image_data(&[1, 2, 3, 4, 5, 6]).unwrap();
        buf
    };

    vec![
        ("color.pfm", pfm("PF\n1 1\n-1.0\n", &[1.0, 2.0, 3.0])),
        ("magic.pfm", pfm("P5\n1 1\n-1.0\n", &[1.0])),
        ("zero_scale.pfm", pfm("Pf\n1 1\n0.0\n", &[1.0])),
        ("truncated.pfm", truncated),
        ("trailing.pfm", trailing),
        ("nan.pfm", pfm("Pf\n2 1\n-1.0\n", &[1.0, f32::NAN])),
        ("duplicate.csv", b"x,y,d\n0,0,1.5\n1,2,3\n0,0,2\n".to_vec()),
        ("bounds.csv", b"x,y,d\n0,0,1.5\n4,0,3\n".to_vec()),
        ("header.csv", b"row,col,disp\n0,0,1\n".to_vec()),
        ("rgb.png", rgb_png),
    ]
}

// ---------------------------------------------------------------------------
// Metrics and file-format inputs.

/// Random prediction/ground-truth pair with invalid pixels on both sides and
/// some errors landing exactly on integer thresholds.
pub fn random_pair(seed: u64) -> (DisparityMap<f64>, DisparityMap<f64>) {
    let mut rng = SceneRng::new(seed, 3);
    let (h, w) = (rng.int(1, 40), rng.int(1, 40));
    let gt_vals = Grid::from_fn(h, w, |_, _| rng.range(0.0, 100.0).round());
    let gt_valid = Grid::from_fn(h, w, |_, _| rng.uniform() > 0.1);
    let mut pred_vals = gt_vals.clone();
    let pred_valid = Grid::from_fn(h, w, |_, _| rng.uniform() > 0.05);
    for v in pred_vals.as_mut_slice() {
        *v += match rng.int(0, 3) {
            0 => rng.int(0, 6) as f64 * if rng.uniform() < 0.5 { -1.0 } else { 1.0 },
            _ => rng.range(-8.0, 8.0),
        };
    }
    let mut gt_valid = gt_valid;
    gt_valid.set(0, 0, true);
    let mut pred_valid = pred_valid;
    pred_valid.set(0, 0, true);
    (
        DisparityMap::new(pred_vals, pred_valid).unwrap(),
        DisparityMap::new(gt_vals, gt_valid).unwrap(),
    )
}

/// Double-loop MAE and error rate; invalid predictions are errors.
pub fn naive_metrics(pred: &DisparityMap<f64>, gt: &DisparityMap<f64>, t: f64) -> (f64, f64) {
    let (mut sum, mut n_mae, mut bad, mut n) = (0.0, 0.0, 0.0, 0.0);
    for r in 0..gt.height() {
        for c in 0..gt.width() {
            if !gt.is_valid(r, c) {
                continue;
            }
            n += 1.0;
            if pred.is_valid(r, c) {
                let e = (pred.values().get(r, c) - gt.values().get(r, c)).abs();
                sum += e;
                n_mae += 1.0;
                if e > t {
                    bad += 1.0;
                }
            } else {
                bad += 1.0;
            }
        }
    }
    (sum / n_mae, 100.0 * bad / n)
}

pub fn random_map(seed: u64, max_value: f64) -> DisparityMap<f32> {
    let mut rng = SceneRng::new(seed, 5);
    let (h, w) = (rng.int(1, 50), rng.int(1, 50));
    let values = Grid::from_fn(h, w, |_, _| rng.range(0.0, max_value) as f32);
    let valid = Grid::from_fn(h, w, |_, _| rng.uniform() > 0.1);
    DisparityMap::new(values, valid).unwrap()
}

pub fn random_hint_map(seed: u64) -> HintMap<f64> {
    let mut rng = SceneRng::new(seed, 6);
    let (h, w) = (rng.int(1, 60), rng.int(1, 60));
    HintMap::from_grid(Grid::from_fn(h, w, |_, _| if rng.uniform() < 0.1 { rng.range(1e-3, 500.0) } else { 0.0 }))
}

