//! Disparity evaluation: mean absolute error and `>t` error rates.
//!
//! The evaluation domain is every pixel with valid ground truth. A pixel
//! the prediction leaves invalid is excluded from the MAE but counts as an
//! error at every threshold. Thresholds are strict: an error of exactly `t`
//! is not counted.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{DisparityMap, HintMap};

/// Thresholds reported by [`evaluate`].
pub const THRESHOLDS: [u32; 4] = [2, 3, 4, 5];

fn check_dims<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>) -> Result<()> {
    if pred.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: pred.dims(),
        });
    }
    Ok(())
}

/// Mean of `|pred - gt|` over pixels valid in both maps.
pub fn mae<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>) -> Result<f64> {
    check_dims(pred, gt)?;
    let (mut sum, mut n, mut missing) = (0.0, 0usize, 0usize);
    for r in 0..gt.height() {
        for c in 0..gt.width() {
            let Some(g) = gt.get(r, c) else { continue };
            match pred.get(r, c) {
                Some(p) => {
                    sum += (p.as_f64() - g.as_f64()).abs();
                    n += 1;
                }
                None => missing += 1,
            }
        }
    }
    if missing > 0 {
        log::warn!("{missing} ground-truth pixels have no prediction; excluded from MAE");
    }
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(sum / n as f64)
}

/// Percentage of ground-truth pixels whose error strictly exceeds `t`.
pub fn error_rate<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>, t: f64) -> Result<f64> {
    check_dims(pred, gt)?;
    if !(t > 0.0) {
        return Err(Error::param("t", format!("threshold must be > 0, got {t}")));
    }
    let (mut bad, mut n) = (0usize, 0usize);
    for r in 0..gt.height() {
        for c in 0..gt.width() {
            let Some(g) = gt.get(r, c) else { continue };
            n += 1;
            match pred.get(r, c) {
                Some(p) if (p.as_f64() - g.as_f64()).abs() <= t => {}
                _ => bad += 1,
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(100.0 * bad as f64 / n as f64)
}

/// Count, density and accuracy of a hint map against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HintStats {
    pub count: usize,
    pub density: f64,
    /// `None` when no hint lands on valid ground truth.
    pub mae: Option<f64>,
}

pub fn hint_stats<T: Scalar>(h: &HintMap<T>, gt: &DisparityMap<T>) -> Result<HintStats> {
    if h.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: h.dims(),
        });
    }
    let (mut sum, mut n) = (0.0, 0usize);
    for (r, c, d) in h.iter_hints() {
        if let Some(g) = gt.get(r, c) {
            sum += (d.as_f64() - g.as_f64()).abs();
            n += 1;
        }
    }
    Ok(HintStats {
        count: h.count(),
        density: if h.height() * h.width() == 0 { 0.0 } else { h.density()? },
        mae: (n > 0).then(|| sum / n as f64),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub name: String,
    pub mae: f64,
    /// Threshold -> percentage of bad pixels.
    pub err_rates: BTreeMap<u32, f64>,
    pub pixels: usize,
    pub hints: Option<HintStats>,
}

/// MAE and the error rate at every threshold of [`THRESHOLDS`].
pub fn evaluate<T: Scalar>(
    name: impl Into<String>,
    pred: &DisparityMap<T>,
    gt: &DisparityMap<T>,
    hints: Option<&HintMap<T>>,
) -> Result<EvalReport> {
    let mae = mae(pred, gt)?;
    let mut err_rates = BTreeMap::new();
    for t in THRESHOLDS {
        err_rates.insert(t, error_rate(pred, gt, t as f64)?);
    }
    Ok(EvalReport {
        name: name.into(),
        mae,
        err_rates,
        pixels: gt.valid_count(),
        hints: hints.map(|h| hint_stats(h, gt)).transpose()?,
    })
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "name,mae,err2,err3,err4,err5,pixels,hints,hint_density,hint_mae";

    /// One CSV row matching [`Self::CSV_HEADER`]. Absent hint fields are
    /// left empty.
    pub fn csv_row(&self) -> String {
        let rate = |t: u32| self.err_rates.get(&t).copied().unwrap_or(f64::NAN);
        let (count, density, hint_mae) = match &self.hints {
            Some(h) => (
                h.count.to_string(),
                format!("{:.6}", h.density),
                h.mae.map(|m| format!("{m:.6}")).unwrap_or_default(),
            ),
            None => Default::default(),
        };
        format!(
            "{},{:.6},{:.4},{:.4},{:.4},{:.4},{},{},{},{}",
            self.name,
            self.mae,
            rate(2),
            rate(3),
            rate(4),
            rate(5),
            self.pixels,
            count,
            density,
            hint_mae
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(f, "  pixels  {}", self.pixels)?;
        writeln!(f, "  MAE     {:.4} px", self.mae)?;
        for (t, rate) in &self.err_rates {
            writeln!(f, "  >{t}px    {rate:.2} %")?;
        }
        if let Some(h) = &self.hints {
            write!(f, "  hints   {} [{:.3} %]", h.count, 100.0 * h.density)?;
            match h.mae {
                Some(m) => writeln!(f, ", MAE {m:.4} px")?,
                None => writeln!(f)?,
            }
        }
        Ok(())
    }
}
