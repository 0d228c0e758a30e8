use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use phenotrap_cli::commands::eval::EvalArgs;
use phenotrap_cli::commands::plot::PlotArgs;
use phenotrap_cli::commands::visits::VisitArgs;
use phenotrap_cli::commands::{berries, eval, greenness, plot, visits, FrameArgs, RunOptions};
use phenotrap_cli::config::SiteConfig;

/// Phenology and visitation metrics from field-camera images.
#[derive(Parser)]
#[command(name = "phenotrap", version)]
struct Cli {
    /// Site configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Treat missing depth maps and out-of-range confidences as errors.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ImageInputs {
    /// Directory of frames, optionally with a frames.csv index.
    #[arg(long)]
    images: Option<PathBuf>,

    /// Directory of `<stem>.depth.png` maps (default: the image directory).
    #[arg(long)]
    depth_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Green-pixel fraction of the depth foreground, with a trend per camera.
    Greenness(ImageInputs),
    /// Red berry counts per frame, with a trend per camera.
    Berries(ImageInputs),
    /// Filter detections, stitch them into visits and count visits per day.
    Visits {
        /// Interchange file from one detector.
        #[arg(long)]
        detections: Option<PathBuf>,
        /// Interchange file carrying taxon classes for the same boxes.
        #[arg(long)]
        classifier: Option<PathBuf>,
    },
    /// Precision, recall and F1 against annotated boxes.
    Eval {
        /// Interchange file with predictions (one or more detectors).
        #[arg(long)]
        detections: Option<PathBuf>,
        /// Interchange file with ground-truth boxes.
        #[arg(long)]
        gt: PathBuf,
        /// Interchange file carrying taxon classes for the predictions.
        #[arg(long)]
        classifier: Option<PathBuf>,
        /// A prediction matches when IoU exceeds this value.
        #[arg(long, default_value_t = 0.1)]
        iou_min: f64,
    },
    /// SVG figures from series, trend and daily-count CSVs.
    Plot {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        trend: Option<PathBuf>,
        /// Daily-counts CSV.
        #[arg(long)]
        visits: Option<PathBuf>,
    },
}

fn required(flag: Option<PathBuf>, fallback: Option<&PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.cloned())
        .with_context(|| format!("--{name} is required (or set paths.{name} in the config)"))
}

fn frame_args(inputs: ImageInputs, site: &SiteConfig, out: PathBuf) -> Result<FrameArgs> {
    Ok(FrameArgs {
        images: required(inputs.images, site.paths.images.as_ref(), "images")?,
        depth_dir: inputs.depth_dir.or_else(|| site.paths.depth_dir.clone()),
        out,
    })
}

fn run(cli: Cli) -> Result<()> {
    let site = SiteConfig::load_or_default(cli.config.as_deref())?;
    let out = cli
        .out
        .or_else(|| site.paths.out.clone())
        .unwrap_or_else(|| Path::new(".").to_path_buf());
    let opts = RunOptions {
        jobs: cli.jobs,
        strict: cli.strict,
    };
    let mut diag = io::stderr().lock();

    match cli.command {
        Command::Greenness(inputs) => greenness::run(&site, &frame_args(inputs, &site, out)?, &opts, &mut diag),
        Command::Berries(inputs) => berries::run(&site, &frame_args(inputs, &site, out)?, &opts, &mut diag),
        Command::Visits { detections, classifier } => {
            let args = VisitArgs {
                detections: required(detections, site.paths.detections.as_ref(), "detections")?,
                classifier,
                out,
            };
            visits::run(&site, &args, &opts, &mut diag)
        }
        Command::Eval {
            detections,
            gt,
            classifier,
            iou_min,
        } => {
            let args = EvalArgs {
                detections: required(detections, site.paths.detections.as_ref(), "detections")?,
                ground_truth: gt,
                classifier,
                iou_min,
                out,
            };
            eval::run(&site, &args, &opts, &mut diag)
        }
        Command::Plot { series, trend, visits } => plot::run(
            &PlotArgs {
                series,
                trend,
                visits,
                out,
            },
            &mut diag,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
