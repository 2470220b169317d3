use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Result};
use densify::io::load_hints;
use densify::matcher::guided_match;
use densify::{expand_graph, expand_linear_multi};

use crate::args::BenchArgs;
use crate::files::{load_gray, load_rgb};

/// Wall-clock samples of one stage, in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub samples_ms: Vec<f64>,
}

impl Stage {
    pub fn median_ms(&self) -> f64 {
        let mut s = self.samples_ms.clone();
        s.sort_by(|a, b| a.total_cmp(b));
        let n = s.len();
        if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub reps: usize,
    pub stages: Vec<Stage>,
}

impl BenchReport {
    pub fn total_ms(&self) -> f64 {
        self.stages.iter().map(Stage::median_ms).sum()
    }

    /// Share of each stage's median in the sum of medians; sums to 100.
    pub fn percentages(&self) -> Vec<(&'static str, f64)> {
        let total = self.total_ms();
        let n = self.stages.len() as f64;
        self.stages
            .iter()
            .map(|s| (s.name, if total > 0.0 { 100.0 * s.median_ms() / total } else { 100.0 / n }))
            .collect()
    }

    pub fn summary(&self) -> String {
        let mut pairs = vec![("reps".to_string(), self.reps.to_string())];
        for (s, (_, pct)) in self.stages.iter().zip(self.percentages()) {
            pairs.push((format!("{}_ms", s.name), format!("{:.3}", s.median_ms())));
            pairs.push((format!("{}_pct", s.name), format!("{pct:.2}")));
        }
        pairs.push(("total_ms".to_string(), format!("{:.3}", self.total_ms())));
        pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }
}

fn time<R>(f: impl FnOnce() -> Result<R>) -> Result<(R, f64)> {
    let start = Instant::now();
    let r = f()?;
    Ok((r, start.elapsed().as_secs_f64() * 1e3))
}

/// Times each stage `reps` times on the same inputs: loading, graph
/// expansion, linear expansion and (with `--right`) guided matching on the
/// graph-expanded hints.
pub fn cmd_bench(a: &BenchArgs, err: &mut (dyn Write + Send)) -> Result<BenchReport> {
    if a.reps < 5 {
        bail!("--reps must be at least 5, got {}", a.reps);
    }
    let names: &[&'static str] = if a.right.is_some() {
        &["load", "graph", "lin3d", "match"]
    } else {
        &["load", "graph", "lin3d"]
    };
    let mut stages: Vec<Stage> = names.iter().map(|&name| Stage { name, samples_ms: Vec::new() }).collect();
    let (graph, linear) = (a.graph.params(), a.linear.params());
    let matching = a.matching.params(&a.guidance);
    for _ in 0..a.reps {
        let ((image, hints, right), t) = time(|| {
            let image = load_rgb(&a.image)?;
            let (h, w) = image.dims();
            let hints = load_hints::<f64>(&a.hints, h, w)?;
            let right = a.right.as_deref().map(load_gray).transpose()?;
            Ok((image, hints, right))
        })?;
        stages[0].samples_ms.push(t);
        let (expanded, t) = time(|| Ok(expand_graph(&hints, &image, &graph)?))?;
        stages[1].samples_ms.push(t);
        let (_, t) = time(|| Ok(expand_linear_multi(&hints, &linear)?))?;
        stages[2].samples_ms.push(t);
        if let Some(right) = &right {
            let left = image.to_gray();
            let (_, t) = time(|| Ok(guided_match(&left, right, &expanded, &matching)?))?;
            stages[3].samples_ms.push(t);
        }
    }
    let report = BenchReport { reps: a.reps, stages };
    writeln!(err, "{:<8} {:>12} {:>8}  samples (ms)", "stage", "median ms", "share")?;
    for (s, (_, pct)) in report.stages.iter().zip(report.percentages()) {
        let samples: Vec<String> = s.samples_ms.iter().map(|v| format!("{v:.3}")).collect();
        writeln!(err, "{:<8} {:>12.3} {:>7.2}%  {}", s.name, s.median_ms(), pct, samples.join(" "))?;
    }
    Ok(report)
}
