use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use densify::matcher::{CostKind, MatchParams};
use densify::synth::TextureKind;
use densify::{FillMode, GraphParams, GuidanceParams, LinearParams, Preset, ShiftSign, SortKey};

#[derive(Debug, Parser)]
#[command(name = "densify", version, about = "Sparse disparity hint densification and guided stereo matching")]
pub struct Cli {
    /// Worker threads for parallel stages; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Scene seed for `simulate`; other subcommands are deterministic and
    /// ignore it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Densify a sparse hint file.
    Expand(ExpandArgs),
    /// Write the per-pixel guided search range.
    Range(RangeArgs),
    /// Drop hints whose left/right descriptors disagree.
    Filter(FilterArgs),
    /// Winner-take-all block matching, guided by hints when given.
    Match(MatchArgs),
    /// Generate a synthetic stereo scene with ground truth and hints.
    Simulate(SimulateArgs),
    /// Score predictions against ground truth.
    Eval(EvalArgs),
    /// Time loading, expansion and matching.
    Bench(BenchArgs),
}

/// Map size written `HEIGHTxWIDTH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub height: usize,
    pub width: usize,
}

impl FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (h, w) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected HEIGHTxWIDTH, got `{s}`"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("invalid size `{v}`"));
        Ok(Dims { height: parse(h)?, width: parse(w)? })
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Color-gated radius graph with slanted line rasterization.
    Graph,
    /// Patch-wise row/column linear interpolation.
    Lin3d,
}

#[derive(Debug, Clone, Args)]
pub struct GraphOpts {
    /// Graph radius in (row, col, disparity) space; overrides the preset.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Cosine color similarity an edge must exceed.
    #[arg(long, default_value_t = 0.9)]
    pub tau: f64,
    /// Dataset preset for the radius: sceneflow, tartan, eth3d or kitti.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Edge order: 3d (volumetric distance) or 2d (planar distance).
    #[arg(long, default_value = "3d")]
    pub sort_key: SortKey,
}

impl GraphOpts {
    pub fn params(&self) -> GraphParams<f64> {
        let base = self.preset.map_or_else(GraphParams::default, |p| p.graph_params());
        GraphParams {
            radius: self.radius.unwrap_or(base.radius),
            color_tau: self.tau,
            sort_key: self.sort_key,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LinearOpts {
    /// Comma-separated tile sides, applied in order.
    #[arg(long, value_delimiter = ',', default_value = "8,16")]
    pub windows: Vec<usize>,
    /// clamped (hold end values) or between (knot span only).
    #[arg(long, default_value = "clamped")]
    pub fill_mode: FillMode,
}

impl LinearOpts {
    pub fn params(&self) -> LinearParams {
        LinearParams { windows: self.windows.clone(), fill_mode: self.fill_mode }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GuidanceOpts {
    /// Relative half-width of a hinted pixel's search range.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub d_min: f64,
    #[arg(long, default_value_t = 192.0)]
    pub d_max: f64,
    /// Peak gain of the cost-volume modulation.
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,
    /// Variance of the cost-volume modulation.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Confidence a hint must exceed to survive filtering.
    #[arg(long, default_value_t = 0.9)]
    pub conf_tau: f64,
    /// Direction of the right-view lookup: plus or minus.
    #[arg(long, default_value = "plus")]
    pub shift_sign: ShiftSign,
}

impl GuidanceOpts {
    pub fn params(&self) -> GuidanceParams<f64> {
        GuidanceParams {
            alpha: self.alpha,
            d_min: self.d_min,
            d_max: self.d_max,
            k: self.k,
            c: self.c,
            conf_tau: self.conf_tau,
            shift_sign: self.shift_sign,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MatchOpts {
    /// Candidates per pixel.
    #[arg(long, default_value_t = 16)]
    pub candidates: usize,
    /// Half side of the matching block.
    #[arg(long, default_value_t = 2)]
    pub block_radius: usize,
    /// sad or zncc.
    #[arg(long, default_value = "sad")]
    pub cost: CostKind,
}

impl MatchOpts {
    pub fn params(&self, guidance: &GuidanceOpts) -> MatchParams<f64> {
        MatchParams {
            block_radius: self.block_radius,
            candidates: self.candidates,
            cost: self.cost,
            guidance: guidance.params(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    /// Input hints CSV.
    #[arg(long)]
    pub hints: PathBuf,
    /// Left image (PNG); required by the graph algorithm.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Map size when no image is given.
    #[arg(long)]
    pub dims: Option<Dims>,
    /// Output hints CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[command(flatten)]
    pub graph: GraphOpts,
    #[command(flatten)]
    pub linear: LinearOpts,
    /// Also write a PPM rendering of the expanded hints.
    #[arg(long)]
    pub viz: Option<PathBuf>,
    /// Disparity mapped to the top of the colormap.
    #[arg(long, default_value_t = 192.0)]
    pub viz_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub hints: PathBuf,
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub dims: Option<Dims>,
    #[command(flatten)]
    pub guidance: GuidanceOpts,
    /// PFM receiving the lower bounds.
    #[arg(long)]
    pub out_low: PathBuf,
    /// PFM receiving the upper bounds.
    #[arg(long)]
    pub out_high: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub hints: PathBuf,
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    /// Descriptor patch side (odd).
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[command(flatten)]
    pub guidance: GuidanceOpts,
    /// Output hints CSV with the confident hints.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional PFM with the per-hint confidence.
    #[arg(long)]
    pub conf_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    /// Hints CSV; without it the full range is searched.
    #[arg(long)]
    pub hints: Option<PathBuf>,
    /// Output disparity map (`.pfm` or `.png`).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub matching: MatchOpts,
    #[command(flatten)]
    pub guidance: GuidanceOpts,
    /// Ground truth to score the prediction against.
    #[arg(long)]
    pub gt: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Directory receiving left.png, right.png, gt.pfm, hints.csv and
    /// scene.cfg.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Scene config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub planes: Option<usize>,
    #[arg(long)]
    pub d_min: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub max_slope: Option<f64>,
    /// noise, gradient, checker or features.
    #[arg(long)]
    pub texture: Option<TextureKind>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Prediction (`.pfm` or `.png`).
    #[arg(long, conflicts_with = "pred_dir", required_unless_present = "pred_dir")]
    pub pred: Option<PathBuf>,
    /// Ground truth (`.pfm` or `.png`).
    #[arg(long, requires = "pred")]
    pub gt: Option<PathBuf>,
    /// Hints CSV to report alongside.
    #[arg(long, requires = "pred")]
    pub hints: Option<PathBuf>,
    /// Row label; defaults to the prediction's file name.
    #[arg(long)]
    pub name: Option<String>,
    /// Directory of predictions, each scored against the file of the same
    /// name in `--gt-dir`.
    #[arg(long, requires = "gt_dir")]
    pub pred_dir: Option<PathBuf>,
    #[arg(long)]
    pub gt_dir: Option<PathBuf>,
    /// Also write the CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub hints: PathBuf,
    /// Left image (PNG).
    #[arg(long)]
    pub image: PathBuf,
    /// Right image; adds a guided matching stage.
    #[arg(long)]
    pub right: Option<PathBuf>,
    /// Repetitions per stage (at least 5); the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[command(flatten)]
    pub graph: GraphOpts,
    #[command(flatten)]
    pub linear: LinearOpts,
    #[command(flatten)]
    pub matching: MatchOpts,
    #[command(flatten)]
    pub guidance: GuidanceOpts,
}
