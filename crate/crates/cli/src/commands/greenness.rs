//! Per-frame greenness, per-camera trend.

use std::io::Write;

use anyhow::Result;
use phenotrap_core::phenology::{extract_foreground, greenness_score};
use phenotrap_core::series::{write_series_csv, write_trend_csv};

use super::frames::{load_depth, load_frame, partition, process, write_skipped, FrameArgs, Outcome};
use super::series::{fit_series, Observation};
use super::{note, write_output, RunOptions};
use crate::config::SiteConfig;
use crate::ingest;

pub const SERIES_FILE: &str = "greenness_series.csv";
pub const TREND_FILE: &str = "greenness_trend.csv";
pub const SKIPPED_FILE: &str = "greenness_skipped.csv";
pub const METRIC: &str = "greenness";

pub fn run(site: &SiteConfig, args: &FrameArgs, opts: &RunOptions, diag: &mut dyn Write) -> Result<()> {
    let inventory = ingest::scan(&args.images)?;
    let depth_dir = args.depth_dir();

    let outcomes = process(opts, &inventory.frames, |entry| {
        let cfg = &site.camera(&entry.camera_id).greenness;
        let frame = load_frame(entry)?;
        let Some(depth) = load_depth(entry, depth_dir, opts.strict)? else {
            return Ok(Outcome::Skip("missing depth map".into()));
        };
        let fg = extract_foreground(&frame, &depth, cfg)
            .map_err(|e| anyhow::anyhow!("{}: {e}", entry.image))?;
        if fg.insufficient {
            return Ok(Outcome::Skip(format!("insufficient foreground ({:.4})", fg.fraction)));
        }
        Ok(Outcome::Value(greenness_score(&frame, &fg.mask, cfg)?))
    })?;

    let (values, skipped) = partition(&inventory, outcomes, diag);
    let observations: Vec<Observation> = values
        .into_iter()
        .map(|(entry, value)| Observation {
            image: entry.image.clone(),
            camera_id: entry.camera_id.clone(),
            timestamp: entry.timestamp,
            value,
        })
        .collect();
    let fitted = fit_series(METRIC, &observations, site, |c| c.greenness_degree);

    write_output(&args.out, SERIES_FILE, |b| Ok(write_series_csv(b, &fitted.series)?))?;
    write_output(&args.out, TREND_FILE, |b| Ok(write_trend_csv(b, &fitted.trends)?))?;
    write_skipped(&args.out, SKIPPED_FILE, &skipped)?;
    note(
        diag,
        format_args!(
            "greenness: {} frames scored, {} skipped, {} trends",
            observations.len(),
            skipped.len(),
            fitted.trends.len()
        ),
    );
    fitted.check()
}
