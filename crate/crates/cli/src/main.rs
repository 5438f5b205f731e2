//! `pa-urn` command-line front end.

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod cmd;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{resolve_model, RunConfig};

/// Invalid input; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "pa-urn", version, about = "Preferential-attachment urn schemes: simulation, LLN paths, rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the truncated count chain.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Ensemble size for the terminal histogram.
        #[arg(long)]
        samples: Option<usize>,
        /// Model preset: homogeneous or figure-one.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Zero-cost trajectory slices with envelope columns.
    Lln {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
        /// Model preset: homogeneous or figure-one.
        #[arg(long)]
        preset: Option<String>,
        /// Comma-separated slice times.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Power-law comparison solutions.
    Envelope {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
        /// Model preset: homogeneous or figure-one.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Rate of a path: star, straight-road, geometric, stretched:r, lln, or a CSV of knots.
    Rate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        preset: Option<String>,
        /// CSV of knots with header t,x_0,...,x_d,x_bar.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Evaluate the truncated rate at this level instead of the limit.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Run the acceptance battery.
    Verify {
        #[command(flatten)]
        common: Common,
        /// full or reduced.
        #[arg(long)]
        budget: Option<String>,
    },
}

const DEFAULT_TIMES: [f64; 3] = [0.01, 0.1, 1.0];

type SliceArgs = (config::Model, usize, Vec<f64>, PathBuf);

fn slice_args(
    command: &str,
    common: Common,
    d: Option<usize>,
    preset: Option<String>,
    times: Option<Vec<f64>>,
) -> anyhow::Result<SliceArgs> {
    let cfg = RunConfig::load(common.config.as_deref(), command)?;
    let model = resolve_model(&cfg, preset.as_deref().or(cfg.preset.as_deref()))?;
    let out = output::out_dir(&common.out.or(cfg.out.clone()).unwrap_or_else(|| ".".into()))?;
    let times = times.or(cfg.times.clone()).unwrap_or_else(|| DEFAULT_TIMES.to_vec());
    Ok((model, d.or(cfg.d).unwrap_or(200), times, out))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate { common, n, d, samples, preset } => {
            let cfg = RunConfig::load(common.config.as_deref(), "simulate")?;
            let model = resolve_model(&cfg, preset.as_deref().or(cfg.preset.as_deref()))?;
            let out = output::out_dir(&common.out.or(cfg.out.clone()).unwrap_or_else(|| ".".into()))?;
            cmd::simulate::cmd_simulate(
                &model,
                n.or(cfg.n).unwrap_or(1000),
                d.or(cfg.d).unwrap_or(5),
                samples.or(cfg.samples).unwrap_or(1000),
                common.seed.or(cfg.seed).unwrap_or(0),
                &out,
            )?;
        }
        Command::Lln { common, d, preset, times } => {
            let (model, d, times, out) = slice_args("lln", common, d, preset, times)?;
            cmd::lln::cmd_lln(&model, d, &times, &out)?;
        }
        Command::Envelope { common, d, preset, times } => {
            let (model, d, times, out) = slice_args("envelope", common, d, preset, times)?;
            cmd::lln::cmd_envelope(&model, d, &times, &out)?;
        }
        Command::Rate { common, preset, path, d } => {
            let cfg = RunConfig::load(common.config.as_deref(), "rate")?;
            let model = resolve_model(&cfg, None)?;
            let out = output::out_dir(&common.out.or(cfg.out.clone()).unwrap_or_else(|| ".".into()))?;
            cmd::rate::cmd_rate(&model, preset.as_deref().or(cfg.preset.as_deref()), path.as_deref(), d.or(cfg.d), &out)?;
        }
        Command::Verify { common, budget } => {
            let cfg = RunConfig::load(common.config.as_deref(), "verify")?;
            let budget = cmd::verify::parse_budget(budget.as_deref().or(cfg.budget.as_deref()).unwrap_or("full"))?;
            let out = output::out_dir(&common.out.or(cfg.out.clone()).unwrap_or_else(|| ".".into()))?;
            return cmd::verify::cmd_verify(budget, common.seed.or(cfg.seed).unwrap_or(20_240_601), &out);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
