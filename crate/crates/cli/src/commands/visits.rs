//! Detections to visits and daily per-species counts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Result;
use phenotrap_core::visits::{daily_counts, run_pipeline, write_daily_csv, write_visits_csv, PipelineSummary};

use super::{note, write_output, RunOptions};
use crate::config::SiteConfig;
use crate::detections;

pub const VISITS_FILE: &str = "visits.csv";
pub const DAILY_FILE: &str = "daily_counts.csv";

#[derive(Debug, Clone)]
pub struct VisitArgs {
    pub detections: PathBuf,
    pub classifier: Option<PathBuf>,
    pub out: PathBuf,
}

fn add(total: &mut PipelineSummary, s: &PipelineSummary) {
    total.records += s.records;
    total.entries_in += s.entries_in;
    total.dropped_confidence += s.dropped_confidence;
    total.dropped_taxon_other += s.dropped_taxon_other;
    total.dropped_taxon_missing += s.dropped_taxon_missing;
    total.dropped_static += s.dropped_static;
    total.entries_out += s.entries_out;
    total.tied_visits += s.tied_visits;
}

pub fn run(site: &SiteConfig, args: &VisitArgs, opts: &RunOptions, diag: &mut dyn Write) -> Result<()> {
    let mut records = detections::load(&args.detections, opts.strict, diag)?;
    detections::single_detector(&records, &args.detections)?;
    if let Some(path) = &args.classifier {
        let classified = detections::load(path, opts.strict, diag)?;
        detections::merge_classifier(&mut records, &classified, opts.strict, diag)?;
    }

    // Each camera runs with its own thresholds.
    let mut by_camera: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for r in records {
        by_camera.entry(r.camera_id.clone()).or_default().push(r);
    }
    let mut summary = PipelineSummary::default();
    let mut visits = Vec::new();
    for (camera, group) in by_camera {
        let outcome = run_pipeline(group, &site.camera(&camera).visits)?;
        add(&mut summary, &outcome.summary);
        visits.extend(outcome.visits);
    }
    let daily = daily_counts(&visits);

    write_output(&args.out, VISITS_FILE, |b| Ok(write_visits_csv(b, &visits)?))?;
    write_output(&args.out, DAILY_FILE, |b| Ok(write_daily_csv(b, &daily)?))?;
    report(diag, &args.detections, &summary, visits.len());
    Ok(())
}

fn report(diag: &mut dyn Write, source: &Path, s: &PipelineSummary, visits: usize) {
    note(diag, format_args!("visits: {}", source.display()));
    note(diag, format_args!("  records                 {}", s.records));
    note(diag, format_args!("  entries in              {}", s.entries_in));
    note(diag, format_args!("  dropped (confidence)    {}", s.dropped_confidence));
    note(diag, format_args!("  dropped (other taxon)   {}", s.dropped_taxon_other));
    note(diag, format_args!("  dropped (no taxon)      {}", s.dropped_taxon_missing));
    note(diag, format_args!("  dropped (static)        {}", s.dropped_static));
    note(diag, format_args!("  entries out             {}", s.entries_out));
    note(diag, format_args!("  visits                  {visits} ({} species ties)", s.tied_visits));
}
