use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use densify::guidance::{compute_range, confidence_filter, patch_descriptor};
use densify::io::{
    load_disparity, load_hints, load_scene_spec, save_hints, save_pfm, save_png16, save_scene_spec,
    save_visualization,
};
use densify::matcher::{baseline_match, guided_match};
use densify::metrics::{evaluate, EvalReport};
use densify::synth::{gen_stereo_scene, SceneSpec};
use densify::{density, expand_graph, expand_linear_multi, DisparityMap, HintMap};
use rayon::prelude::*;

use crate::args::{Algo, Dims, EvalArgs, ExpandArgs, FilterArgs, MatchArgs, RangeArgs, SimulateArgs};
use crate::files::{load_gray, load_rgb, save_rgb};
use crate::summary_line;

fn resolve_dims(image: Option<(usize, usize)>, dims: Option<Dims>) -> Result<(usize, usize)> {
    match (image, dims) {
        (Some(d), Some(given)) if d != (given.height, given.width) => {
            bail!("--dims {given} disagrees with the image size {}x{}", d.0, d.1)
        }
        (Some(d), _) => Ok(d),
        (None, Some(given)) => Ok((given.height, given.width)),
        (None, None) => bail!("the map size is unknown: pass --image or --dims"),
    }
}

fn read_hints(path: &Path, (height, width): (usize, usize)) -> Result<HintMap<f64>> {
    load_hints(path, height, width).with_context(|| format!("reading {}", path.display()))
}

fn save_disparity(map: &DisparityMap<f64>, path: &Path) -> Result<()> {
    let png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if png { save_png16(map, path) } else { save_pfm(map, path) }
        .with_context(|| format!("writing {}", path.display()))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_expand(a: &ExpandArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let image = a.image.as_deref().map(load_rgb).transpose()?;
    let dims = resolve_dims(image.as_ref().map(|i| i.dims()), a.dims)?;
    let hints = read_hints(&a.hints, dims)?;
    let start = Instant::now();
    let expanded = match a.algo {
        Algo::Graph => {
            let image = image.as_ref().ok_or_else(|| anyhow!("--algo graph needs --image for the color gate"))?;
            expand_graph(&hints, image, &a.graph.params())?
        }
        Algo::Lin3d => expand_linear_multi(&hints, &a.linear.params())?,
    };
    let elapsed = ms(start);
    save_hints(&expanded, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(path) = &a.viz {
        save_visualization(&expanded, 0.0, a.viz_max, path)?;
    }
    let (d_in, d_out) = (density(&hints)?, density(&expanded)?);
    let algo = match a.algo {
        Algo::Graph => "graph",
        Algo::Lin3d => "lin3d",
    };
    writeln!(
        out,
        "{}",
        summary_line(&[
            ("algo", algo.into()),
            ("hints_in", hints.count().to_string()),
            ("hints_out", expanded.count().to_string()),
            ("density_in", format!("{d_in:.6}")),
            ("density_out", format!("{d_out:.6}")),
            ("ms", format!("{elapsed:.3}")),
        ])
    )?;
    writeln!(
        err,
        "{algo}: {} -> {} hints ({:.3}% -> {:.3}%) in {elapsed:.1} ms",
        hints.count(),
        expanded.count(),
        100.0 * d_in,
        100.0 * d_out
    )?;
    Ok(())
}

pub fn cmd_range(a: &RangeArgs, out: &mut (dyn Write + Send), _err: &mut (dyn Write + Send)) -> Result<()> {
    let image = a.image.as_deref().map(load_rgb).transpose()?;
    let dims = resolve_dims(image.as_ref().map(|i| i.dims()), a.dims)?;
    let hints = read_hints(&a.hints, dims)?;
    let range = compute_range(&hints, &a.guidance.params())?;
    save_disparity(&DisparityMap::from_values(range.low.clone()), &a.out_low)?;
    save_disparity(&DisparityMap::from_values(range.high.clone()), &a.out_high)?;
    let widths = range.high.as_slice().iter().zip(range.low.as_slice()).map(|(h, l)| h - l);
    let mean_width = widths.sum::<f64>() / range.low.len().max(1) as f64;
    writeln!(
        out,
        "{}",
        summary_line(&[
            ("pixels", range.low.len().to_string()),
            ("hinted", hints.count().to_string()),
            ("mean_width", format!("{mean_width:.6}")),
        ])
    )?;
    Ok(())
}

pub fn cmd_filter(a: &FilterArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let (left, right) = (load_gray(&a.left)?, load_gray(&a.right)?);
    let hints = read_hints(&a.hints, left.dims())?;
    let start = Instant::now();
    let (fl, fr) = (patch_descriptor(&left, a.window)?, patch_descriptor(&right, a.window)?);
    let (kept, conf) = confidence_filter(&hints, &fl, &fr, &a.guidance.params())?;
    let elapsed = ms(start);
    save_hints(&kept, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(path) = &a.conf_out {
        save_pfm(&DisparityMap::from_values(conf), path)?;
    }
    writeln!(
        out,
        "{}",
        summary_line(&[
            ("hints_in", hints.count().to_string()),
            ("hints_kept", kept.count().to_string()),
            ("ms", format!("{elapsed:.3}")),
        ])
    )?;
    writeln!(err, "kept {} of {} hints", kept.count(), hints.count())?;
    Ok(())
}

pub fn cmd_match(a: &MatchArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let (left, right) = (load_gray(&a.left)?, load_gray(&a.right)?);
    let params = a.matching.params(&a.guidance);
    let hints = a.hints.as_deref().map(|p| read_hints(p, left.dims())).transpose()?;
    let start = Instant::now();
    let pred = match &hints {
        Some(h) => guided_match(&left, &right, h, &params)?,
        None => baseline_match(&left, &right, &params)?,
    };
    let elapsed = ms(start);
    save_disparity(&pred, &a.out)?;
    let mut pairs = vec![
        ("mode", if hints.is_some() { "guided" } else { "baseline" }.to_string()),
        ("pixels", pred.valid_count().to_string()),
        ("ms", format!("{elapsed:.3}")),
    ];
    if let Some(gt_path) = &a.gt {
        let gt = load_disparity::<f64>(gt_path).with_context(|| format!("reading {}", gt_path.display()))?;
        let report = evaluate(file_label(&a.out), &pred, &gt, hints.as_ref())?;
        pairs.push(("mae", format!("{:.6}", report.mae)));
        pairs.push(("err3", format!("{:.4}", report.err_rates[&3])));
        writeln!(err, "{report}")?;
    }
    writeln!(out, "{}", summary_line(&pairs))?;
    Ok(())
}

pub fn cmd_simulate(a: &SimulateArgs, seed: Option<u64>, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let mut spec = match &a.config {
        Some(path) => load_scene_spec(path).with_context(|| format!("reading {}", path.display()))?,
        None => SceneSpec::default(),
    };
    spec.seed = seed.unwrap_or(spec.seed);
    spec.height = a.height.unwrap_or(spec.height);
    spec.width = a.width.unwrap_or(spec.width);
    spec.planes = a.planes.unwrap_or(spec.planes);
    spec.d_min = a.d_min.unwrap_or(spec.d_min);
    spec.d_max = a.d_max.unwrap_or(spec.d_max);
    spec.max_slope = a.max_slope.unwrap_or(spec.max_slope);
    spec.texture = a.texture.unwrap_or(spec.texture);
    spec.density = a.density.unwrap_or(spec.density);
    spec.noise_sigma = a.noise_sigma.unwrap_or(spec.noise_sigma);
    spec.validate()?;

    let scene = gen_stereo_scene::<f64>(&spec)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let path = |name: &str| a.out_dir.join(name);
    save_rgb(&scene.scene.left, &path("left.png"))?;
    save_rgb(&scene.right, &path("right.png"))?;
    save_pfm(&scene.scene.disparity, path("gt.pfm"))?;
    save_hints(&scene.hints, path("hints.csv"))?;
    save_scene_spec(&spec, path("scene.cfg"))?;
    writeln!(
        out,
        "{}",
        summary_line(&[
            ("seed", spec.seed.to_string()),
            ("height", spec.height.to_string()),
            ("width", spec.width.to_string()),
            ("hints", scene.hints.count().to_string()),
            ("density", format!("{:.6}", density(&scene.hints)?)),
            ("dir", a.out_dir.display().to_string()),
        ])
    )?;
    writeln!(err, "wrote left.png right.png gt.pfm hints.csv scene.cfg to {}", a.out_dir.display())?;
    Ok(())
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn eval_pair(name: String, pred: &Path, gt: &Path, hints: Option<&Path>) -> Result<EvalReport> {
    let read = |p: &Path| load_disparity::<f64>(p).with_context(|| format!("reading {}", p.display()));
    let (pred_map, gt_map) = (read(pred)?, read(gt)?);
    let hints = hints.map(|p| read_hints(p, gt_map.dims())).transpose()?;
    evaluate(name.clone(), &pred_map, &gt_map, hints.as_ref()).with_context(|| format!("evaluating {name}"))
}

fn disparity_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| {
        p.is_file()
            && p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("pfm") || e.eq_ignore_ascii_case("png"))
    });
    files.sort();
    Ok(files)
}

pub fn cmd_eval(a: &EvalArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let reports = match (&a.pred, &a.pred_dir) {
        (Some(pred), _) => {
            let gt = a.gt.as_deref().ok_or_else(|| anyhow!("--pred needs --gt"))?;
            let name = a.name.clone().unwrap_or_else(|| file_label(pred));
            vec![eval_pair(name, pred, gt, a.hints.as_deref())?]
        }
        (None, Some(dir)) => {
            let gt_dir = a.gt_dir.as_deref().ok_or_else(|| anyhow!("--pred-dir needs --gt-dir"))?;
            let files = disparity_files(dir)?;
            if files.is_empty() {
                bail!("no .pfm or .png files in {}", dir.display());
            }
            files
                .par_iter()
                .map(|p| {
                    let name = file_label(p);
                    let gt = gt_dir.join(&name);
                    if !gt.is_file() {
                        bail!("no ground truth for {name} in {}", gt_dir.display());
                    }
                    eval_pair(name, p, &gt, None)
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, None) => bail!("pass --pred or --pred-dir"),
    };
    let mut csv = format!("{}\n", EvalReport::CSV_HEADER);
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
        writeln!(err, "{r}")?;
    }
    out.write_all(csv.as_bytes())?;
    if let Some(path) = &a.out {
        fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
