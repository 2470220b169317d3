//! `densify` command-line frontend.
//!
//! Every subcommand prints one `key=value` summary line on stdout (except
//! `eval`, whose stdout is CSV) and human-oriented detail on stderr. All
//! numerical work is delegated to the `densify` library, so outputs equal
//! direct library calls with the same parameters.

mod args;
mod bench;
mod commands;
mod files;

use std::io::Write;

pub use args::{
    Algo, BenchArgs, Cli, Command, Dims, EvalArgs, ExpandArgs, FilterArgs, GraphOpts, GuidanceOpts, LinearOpts,
    MatchArgs, MatchOpts, RangeArgs, SimulateArgs,
};
pub use bench::{cmd_bench, BenchReport, Stage};
pub use commands::{cmd_eval, cmd_expand, cmd_filter, cmd_match, cmd_range, cmd_simulate};
pub use files::{load_gray, load_rgb, save_rgb};

/// Runs `cli` inside a thread pool of the requested size.
pub fn run(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build()?;
    pool.install(|| match &cli.command {
        Command::Expand(a) => cmd_expand(a, out, err),
        Command::Range(a) => cmd_range(a, out, err),
        Command::Filter(a) => cmd_filter(a, out, err),
        Command::Match(a) => cmd_match(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, cli.seed, out, err),
        Command::Eval(a) => cmd_eval(a, out, err),
        Command::Bench(a) => {
            let report = cmd_bench(a, err)?;
            writeln!(out, "{}", report.summary())?;
            Ok(())
        }
    })
}

/// `key=value` pairs joined by spaces.
pub(crate) fn summary_line(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}
