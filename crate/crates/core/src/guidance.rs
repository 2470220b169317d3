//! Hint-driven search ranges, cost-volume modulation and hint confidence.

use crate::error::{Error, Result};
use crate::params::{GuidanceParams, ShiftSign};
use crate::scalar::Scalar;
use crate::types::{GrayImage, Grid, HintMap};

/// Per-pixel disparity search interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceRange<T> {
    pub low: Grid<T>,
    pub high: Grid<T>,
}

impl<T: Scalar> GuidanceRange<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.low.dims()
    }

    #[inline]
    pub fn bounds(&self, row: usize, col: usize) -> (T, T) {
        (self.low.get(row, col), self.high.get(row, col))
    }
}

/// Search interval for every pixel.
///
/// A hinted pixel gets `[h (1 - alpha), h (1 + alpha)]` clamped into
/// `[d_min, d_max]`; every other pixel gets the full `[d_min, d_max]`.
pub fn compute_range<T: Scalar>(h: &HintMap<T>, params: &GuidanceParams<T>) -> Result<GuidanceRange<T>> {
    params.validate()?;
    let (lo_scale, hi_scale) = (T::one() - params.alpha, T::one() + params.alpha);
    let clamp = |v: T| v.max(params.d_min).min(params.d_max);
    let low = h.grid().map(|v| if v > T::zero() { clamp(v * lo_scale) } else { params.d_min });
    let high = h.grid().map(|v| if v > T::zero() { clamp(v * hi_scale) } else { params.d_max });
    Ok(GuidanceRange { low, high })
}

/// `n` evenly spaced values over `[low, high]`, endpoints included; a single
/// candidate sits at the midpoint.
pub fn linspace<T: Scalar>(low: T, high: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![(low + high) / T::of(2.0)],
        _ => {
            let last = T::of_usize(n - 1);
            let step = (high - low) / last;
            (0..n)
                .map(|i| if i == n - 1 { high } else { low + step * T::of_usize(i) })
                .collect()
        }
    }
}

/// Candidate disparities for one pixel.
pub fn sample_candidates<T: Scalar>(r: &GuidanceRange<T>, row: usize, col: usize, n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::param("n", "need at least one candidate"));
    }
    let (low, high) = r.bounds(row, col);
    Ok(linspace(low, high, n))
}

/// Per-pixel, per-disparity matching values over integer disparity levels
/// `d_min, d_min + 1, ..., d_min + levels - 1`.
///
/// Values use similarity polarity: higher means a better match. Volumes
/// holding costs must be negated before modulation.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume<T> {
    height: usize,
    width: usize,
    d_min: i64,
    levels: usize,
    data: Vec<T>,
}

impl<T: Scalar> CostVolume<T> {
    pub fn filled(height: usize, width: usize, d_min: i64, levels: usize, value: T) -> Self {
        Self {
            height,
            width,
            d_min,
            levels,
            data: vec![value; height * width * levels],
        }
    }

    pub fn from_vec(height: usize, width: usize, d_min: i64, levels: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != height * width * levels {
            return Err(Error::param("data", "length must be height * width * levels"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("data", "cost volume values must be finite"));
        }
        Ok(Self {
            height,
            width,
            d_min,
            levels,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn d_min(&self) -> i64 {
        self.d_min
    }

    pub fn d_max(&self) -> i64 {
        self.d_min + self.levels as i64 - 1
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// All levels at one pixel.
    pub fn at(&self, row: usize, col: usize) -> &[T] {
        let start = (row * self.width + col) * self.levels;
        &self.data[start..start + self.levels]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut [T] {
        let start = (row * self.width + col) * self.levels;
        &mut self.data[start..start + self.levels]
    }

    pub fn get(&self, row: usize, col: usize, level: usize) -> T {
        self.at(row, col)[level]
    }

    /// Disparity at a level index.
    pub fn disparity(&self, level: usize) -> i64 {
        self.d_min + level as i64
    }

    /// Disparity of the highest value at a pixel; ties go to the lowest.
    pub fn argmax(&self, row: usize, col: usize) -> i64 {
        let values = self.at(row, col);
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        self.disparity(best)
    }
}

/// Gaussian gain applied at disparity `d` of a pixel with hint `hint`:
/// `k exp(-(d - hint)^2 / (2c))` for hinted pixels, 1 elsewhere.
#[inline]
pub fn modulation_gain<T: Scalar>(d: T, hint: T, k: T, c: T) -> T {
    if hint > T::zero() {
        let diff = d - hint;
        k * (-(diff * diff) / (T::of(2.0) * c)).exp()
    } else {
        T::one()
    }
}

/// Multiplies every hinted pixel's slice of `volume` by a Gaussian centered
/// on its hint. Unhinted pixels are copied unchanged.
pub fn modulate_cost_volume<T: Scalar>(
    volume: &CostVolume<T>,
    h: &HintMap<T>,
    params: &GuidanceParams<T>,
) -> Result<CostVolume<T>> {
    params.validate()?;
    if volume.dims() != h.dims() {
        return Err(Error::DimensionMismatch {
            expected: volume.dims(),
            actual: h.dims(),
        });
    }
    if T::of(volume.d_min() as f64) > params.d_min || T::of(volume.d_max() as f64) < params.d_max {
        return Err(Error::param(
            "volume",
            format!(
                "disparity axis [{}, {}] does not cover [{}, {}]",
                volume.d_min(),
                volume.d_max(),
                params.d_min,
                params.d_max
            ),
        ));
    }
    let mut out = volume.clone();
    for (row, col, hint) in h.iter_hints() {
        let d_min = volume.d_min();
        for (level, v) in out.at_mut(row, col).iter_mut().enumerate() {
            let d = T::of((d_min + level as i64) as f64);
            *v = modulation_gain(d, hint, params.k, params.c) * *v;
        }
    }
    Ok(out)
}

/// Per-pixel descriptors of a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap<T> {
    height: usize,
    width: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMap<T> {
    /// Checks that every descriptor has unit norm (within `1e-6`).
    pub fn new(height: usize, width: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != height * width * dim || dim == 0 {
            return Err(Error::param("data", "length must be height * width * dim, dim > 0"));
        }
        let map = Self {
            height,
            width,
            dim,
            data,
        };
        for r in 0..height {
            for c in 0..width {
                let n = map.at(r, c).iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
                if (n.as_f64() - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidValue {
                        row: r,
                        col: c,
                        reason: format!("descriptor norm {n} is not 1"),
                    });
                }
            }
        }
        Ok(map)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> &[T] {
        let start = (row * self.width + col) * self.dim;
        &self.data[start..start + self.dim]
    }
}

/// Zero-mean, unit-norm intensity patches of side `window` (odd, >= 3),
/// sampled with clamped borders. Flat patches map to the constant vector
/// `1 / sqrt(window^2)`.
pub fn patch_descriptor<T: Scalar>(img: &GrayImage<T>, window: usize) -> Result<FeatureMap<T>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::param("window", format!("must be odd and >= 3, got {window}")));
    }
    let (height, width) = img.dims();
    let dim = window * window;
    let half = (window / 2) as isize;
    let canonical = T::one() / T::of_usize(dim).sqrt();
    let flat_limit = T::of(1e-9);
    let mut data = Vec::with_capacity(height * width * dim);
    let mut patch = vec![T::zero(); dim];
    for r in 0..height as isize {
        for c in 0..width as isize {
            let mut k = 0;
            for dr in -half..=half {
                for dc in -half..=half {
                    patch[k] = img.get_clamped(r + dr, c + dc);
                    k += 1;
                }
            }
            let mean = patch.iter().fold(T::zero(), |a, &b| a + b) / T::of_usize(dim);
            patch.iter_mut().for_each(|v| *v = *v - mean);
            let norm = patch.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
            if norm < flat_limit {
                data.extend(std::iter::repeat(canonical).take(dim));
            } else {
                data.extend(patch.iter().map(|&v| v / norm));
            }
        }
    }
    Ok(FeatureMap {
        height,
        width,
        dim,
        data,
    })
}

/// Confidence `1 - tanh(|fL(x, y) - fR(x, y +/- round(h))|^2)` for every
/// hint. Lookups that leave the right feature map score 0.
///
/// Returns the hints whose confidence is strictly above `conf_tau` and the
/// per-pixel confidence (0 wherever there is no hint).
pub fn confidence_filter<T: Scalar>(
    h: &HintMap<T>,
    left: &FeatureMap<T>,
    right: &FeatureMap<T>,
    params: &GuidanceParams<T>,
) -> Result<(HintMap<T>, Grid<T>)> {
    for dims in [left.dims(), right.dims()] {
        if dims != h.dims() {
            return Err(Error::DimensionMismatch {
                expected: h.dims(),
                actual: dims,
            });
        }
    }
    if left.dim() != right.dim() {
        return Err(Error::param("features", "left and right descriptors differ in length"));
    }
    let (height, width) = h.dims();
    let mut kept = HintMap::new(height, width);
    let mut conf = Grid::filled(height, width, T::zero());
    for (row, col, hint) in h.iter_hints() {
        let shift = hint.round().to_isize().unwrap_or(isize::MAX);
        let target = match params.shift_sign {
            ShiftSign::Plus => (col as isize).checked_add(shift),
            ShiftSign::Minus => (col as isize).checked_sub(shift),
        };
        let score = match target {
            Some(t) if t >= 0 && (t as usize) < width => {
                let dist2 = left
                    .at(row, col)
                    .iter()
                    .zip(right.at(row, t as usize))
                    .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                (T::one() - dist2.tanh()).max(T::zero()).min(T::one())
            }
            _ => T::zero(),
        };
        conf.set(row, col, score);
        if score > params.conf_tau {
            kept.put(row, col, hint);
        }
    }
    Ok((kept, conf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GuidanceParams<f64> {
        GuidanceParams::default()
    }

    #[test]
    fn range_examples() {
        let h = HintMap::from_hints(1, 3, [(0, 0, 50.0), (0, 2, 180.0)]).unwrap();
        let r = compute_range(&h, &params()).unwrap();
        assert_eq!(r.bounds(0, 0), (40.0, 60.0));
        assert_eq!(r.bounds(0, 1), (0.0, 192.0));
        assert_eq!(r.bounds(0, 2), (144.0, 192.0));
    }

    #[test]
    fn candidate_spacing() {
        let h = HintMap::from_hints(1, 1, [(0, 0, 50.0)]).unwrap();
        let r = compute_range(&h, &params()).unwrap();
        assert_eq!(sample_candidates(&r, 0, 0, 5).unwrap(), vec![40.0, 45.0, 50.0, 55.0, 60.0]);
        assert_eq!(sample_candidates(&r, 0, 0, 1).unwrap(), vec![50.0]);
        assert!(sample_candidates(&r, 0, 0, 0).is_err());
        assert_eq!(linspace(7.0, 7.0, 3), vec![7.0; 3]);
    }

    #[test]
    fn modulation_examples() {
        let p = params();
        assert_eq!(modulation_gain(4.0, 0.0, p.k, p.c), 1.0);
        assert_eq!(modulation_gain(20.0, 20.0, p.k, p.c), 10.0);
        let g = modulation_gain(23.0, 20.0, p.k, p.c);
        assert!((g - 0.111_089_965_382_423).abs() < 1e-12, "{g}");
    }

    #[test]
    fn modulate_volume() {
        let p = GuidanceParams { d_max: 40.0, ..params() };
        let h = HintMap::from_hints(2, 2, [(1, 1, 20.0)]).unwrap();
        let vol = CostVolume::filled(2, 2, 0, 41, 0.5);
        let out = modulate_cost_volume(&vol, &h, &p).unwrap();
        assert_eq!(out.at(0, 0), vol.at(0, 0));
        assert_eq!(out.get(1, 1, 20), 5.0);
        assert_eq!(out.argmax(1, 1), 20);

        let short = CostVolume::filled(2, 2, 0, 30, 0.5);
        assert!(modulate_cost_volume(&short, &h, &p).is_err());
        let wrong = CostVolume::filled(3, 2, 0, 41, 0.5);
        assert!(matches!(
            modulate_cost_volume(&wrong, &h, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn features(dim_values: &[[f64; 2]], width: usize) -> FeatureMap<f64> {
        let data = dim_values.iter().flat_map(|v| v.iter().copied()).collect();
        FeatureMap::new(1, width, 2, data).unwrap()
    }

    #[test]
    fn confidence_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Columns: 0 -> (1,0), 1 -> (0,1), 2 -> (1,0), 3 -> (s,s)
        let f = features(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [s, s]], 4);
        let h = HintMap::from_hints(1, 4, [(0, 0, 2.0), (0, 1, 2.0), (0, 2, 5.0)]).unwrap();
        let (kept, conf) = confidence_filter(&h, &f, &f, &params()).unwrap();
        // (0,0) -> col 2: identical descriptors.
        assert_eq!(conf.get(0, 0), 1.0);
        // (0,1) -> col 3: |(0,1) - (s,s)|^2 = 2 - 2s.
        let expected = 1.0 - (2.0 - 2.0 * s).tanh();
        assert!((conf.get(0, 1) - expected).abs() < 1e-12);
        // (0,2) -> col 7: outside.
        assert_eq!(conf.get(0, 2), 0.0);
        assert_eq!(kept.iter_hints().collect::<Vec<_>>(), vec![(0, 0, 2.0)]);
    }

    #[test]
    fn unit_distance_is_dropped() {
        // Descriptors (1,0) and (0,1) are sqrt(2) apart; use a 45-degree
        // pair at squared distance 1 instead: (1,0) vs (1/2, sqrt(3)/2).
        let f = features(&[[1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]], 2);
        let h = HintMap::from_hints(1, 2, [(0, 0, 1.0)]).unwrap();
        let (kept, conf) = confidence_filter(&h, &f, &f, &params()).unwrap();
        assert!((conf.get(0, 0) - (1.0 - 1f64.tanh())).abs() < 1e-12);
        assert!((conf.get(0, 0) - 0.238_405_844).abs() < 1e-9);
        assert_eq!(kept.count(), 0);
    }

    #[test]
    fn minus_shift() {
        let f = features(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], 3);
        let h = HintMap::from_hints(1, 3, [(0, 2, 2.0)]).unwrap();
        let p = GuidanceParams { shift_sign: ShiftSign::Minus, ..params() };
        let (kept, _) = confidence_filter(&h, &f, &f, &p).unwrap();
        assert_eq!(kept.count(), 1);
        let (kept, conf) = confidence_filter(&h, &f, &f, &params()).unwrap();
        assert_eq!((kept.count(), conf.get(0, 2)), (0, 0.0));
    }

    #[test]
    fn descriptors() {
        let flat = Grid::filled(4, 5, 0.3f64);
        let f = patch_descriptor(&flat, 3).unwrap();
        let canonical = vec![1.0 / 3.0; 9];
        for r in 0..4 {
            for c in 0..5 {
                assert_eq!(f.at(r, c), &canonical[..]);
            }
        }
        let img = Grid::from_fn(12, 12, |r, c| ((r * 7 + c * 3) % 5) as f64 / 5.0);
        let f = patch_descriptor(&img, 5).unwrap();
        for r in 0..12 {
            for c in 0..12 {
                let n: f64 = f.at(r, c).iter().map(|v| v * v).sum();
                assert!((n.sqrt() - 1.0).abs() < 1e-6);
            }
        }
        // Pixels (2,2) and (7,7) see the same 5x5 pattern: period 5 in both axes.
        assert_eq!(f.at(2, 2), f.at(7, 7));
        assert_ne!(f.at(2, 2), f.at(2, 3));
        assert!(patch_descriptor(&img, 4).is_err());
        assert!(patch_descriptor(&img, 1).is_err());
    }
}
