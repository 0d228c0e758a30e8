//! Detector scores against ground truth, one row per detector and stage.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use phenotrap_core::eval::{evaluate_stages, write_eval_csv};

use super::{note, write_output, RunOptions};
use crate::config::SiteConfig;
use crate::detections;

pub const EVAL_FILE: &str = "eval.csv";

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub detections: PathBuf,
    pub ground_truth: PathBuf,
    pub classifier: Option<PathBuf>,
    pub iou_min: f64,
    pub out: PathBuf,
}

pub fn run(site: &SiteConfig, args: &EvalArgs, opts: &RunOptions, diag: &mut dyn Write) -> Result<()> {
    let mut pred = detections::load(&args.detections, opts.strict, diag)?;
    if let Some(path) = &args.classifier {
        let classified = detections::load(path, opts.strict, diag)?;
        detections::merge_classifier(&mut pred, &classified, opts.strict, diag)?;
    }
    let truth = detections::load(&args.ground_truth, true, diag)?;
    let rows = evaluate_stages(&pred, &truth, &site.defaults.visits, args.iou_min)
        .with_context(|| format!("evaluating {} against {}", args.detections.display(), args.ground_truth.display()))?;
    write_output(&args.out, EVAL_FILE, |b| Ok(write_eval_csv(b, &rows)?))?;
    for r in &rows {
        note(
            diag,
            format_args!(
                "{} {}: P={:.3} R={:.3} F1={:.3} (tp={} fp={} fn={})",
                r.detector, r.stage, r.precision, r.recall, r.f1, r.tp, r.fp, r.fn_
            ),
        );
    }
    Ok(())
}
