use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::filter::{filter_confidence, filter_taxon, suppress_static_all};
use super::record::DetectionRecord;
use crate::{Error, Result};

pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VisitConfig {
    pub confidence_min: f64,
    pub static_iou: f64,
    pub static_run: usize,
    pub stitch_gap_s: f64,
    pub taxon_keep: BTreeSet<String>,
}

impl Default for VisitConfig {
    fn default() -> Self {
        Self {
            confidence_min: 0.2,
            static_iou: 0.75,
            static_run: 5,
            stitch_gap_s: 15.0,
            taxon_keep: BTreeSet::from(["Aves".to_owned()]),
        }
    }
}

impl VisitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence_min) {
            return Err(Error::InvalidConfig(format!(
                "confidence_min must lie in [0, 1], got {}",
                self.confidence_min
            )));
        }
        if !(0.0..=1.0).contains(&self.static_iou) {
            return Err(Error::InvalidConfig(format!(
                "static_iou must lie in [0, 1], got {}",
                self.static_iou
            )));
        }
        if self.static_run < 2 {
            return Err(Error::InvalidConfig(format!(
                "static_run must be >= 2, got {}",
                self.static_run
            )));
        }
        if !(self.stitch_gap_s.is_finite() && self.stitch_gap_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "stitch_gap_s must be positive, got {}",
                self.stitch_gap_s
            )));
        }
        if self.taxon_keep.is_empty() {
            return Err(Error::InvalidConfig("taxon_keep is empty".into()));
        }
        Ok(())
    }
}

/// A run of frames at one camera with inter-frame gaps below the stitch gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub camera_id: String,
    pub species: String,
    /// More than one label shared the top vote; `species` is the
    /// lexicographically first of them.
    pub species_tie: bool,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub n_frames: usize,
    pub member_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DailyCount {
    pub date: NaiveDate,
    pub camera_id: String,
    pub species: String,
    pub visits: usize,
}

fn majority_label<'a>(labels: impl Iterator<Item = &'a str>) -> (String, bool) {
    let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        let l = if l.trim().is_empty() { UNCLASSIFIED } else { l };
        *votes.entry(l).or_default() += 1;
    }
    let Some(top) = votes.values().copied().max() else {
        return (UNCLASSIFIED.to_owned(), false);
    };
    let mut winners = votes.iter().filter(|(_, &v)| v == top).map(|(k, _)| *k);
    let first = winners.next().unwrap_or(UNCLASSIFIED).to_owned();
    (first, winners.next().is_some())
}

/// Groups one camera's time-sorted records into visits. Records without
/// entries are ignored.
pub fn stitch_visits(records: &[DetectionRecord], stitch_gap_s: f64) -> Vec<Visit> {
    let gap_ms = stitch_gap_s * 1000.0;
    let mut groups: Vec<Vec<&DetectionRecord>> = Vec::new();
    for r in records.iter().filter(|r| !r.entries.is_empty()) {
        match groups.last_mut() {
            Some(g) if ((r.timestamp - g[g.len() - 1].timestamp).num_milliseconds() as f64) < gap_ms => g.push(r),
            _ => groups.push(vec![r]),
        }
    }

    groups
        .into_iter()
        .map(|g| {
            let (species, species_tie) =
                majority_label(g.iter().flat_map(|r| r.entries.iter().map(|e| e.label.as_str())));
            Visit {
                camera_id: g[0].camera_id.clone(),
                species,
                species_tie,
                start: g[0].timestamp,
                end: g[g.len() - 1].timestamp,
                n_frames: g.len(),
                member_refs: g.iter().map(|r| r.image_path.clone()).collect(),
            }
        })
        .collect()
}

/// Visits per `(UTC start date, camera, species)`, sorted by that key.
pub fn daily_counts(visits: &[Visit]) -> Vec<DailyCount> {
    let mut counts: BTreeMap<(NaiveDate, &str, &str), usize> = BTreeMap::new();
    for v in visits {
        *counts
            .entry((v.start.date_naive(), v.camera_id.as_str(), v.species.as_str()))
            .or_default() += 1;
    }
    counts
        .into_iter()
        .map(|((date, camera_id, species), visits)| DailyCount {
            date,
            camera_id: camera_id.to_owned(),
            species: species.to_owned(),
            visits,
        })
        .collect()
}

/// Entry counts through each filter stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineSummary {
    pub records: usize,
    pub entries_in: usize,
    pub dropped_confidence: usize,
    pub dropped_taxon_other: usize,
    pub dropped_taxon_missing: usize,
    pub dropped_static: usize,
    pub entries_out: usize,
    pub tied_visits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisitsOutcome {
    pub visits: Vec<Visit>,
    pub daily: Vec<DailyCount>,
    pub summary: PipelineSummary,
    /// Filtered records, sorted by `(camera_id, timestamp, image)`.
    pub records: Vec<DetectionRecord>,
}

/// Confidence filter, taxon filter, static suppression, stitching and daily
/// counts. Input order does not matter.
pub fn run_pipeline(mut records: Vec<DetectionRecord>, cfg: &VisitConfig) -> Result<VisitsOutcome> {
    cfg.validate()?;
    records.sort_by(|a, b| {
        (&a.camera_id, a.timestamp, &a.image_path).cmp(&(&b.camera_id, b.timestamp, &b.image_path))
    });
    let mut summary = PipelineSummary {
        records: records.len(),
        entries_in: records.iter().map(|r| r.entries.len()).sum(),
        ..PipelineSummary::default()
    };

    summary.dropped_confidence = filter_confidence(&mut records, cfg.confidence_min);
    let taxon = filter_taxon(&mut records, &cfg.taxon_keep);
    summary.dropped_taxon_other = taxon.dropped_other;
    summary.dropped_taxon_missing = taxon.dropped_missing;
    summary.dropped_static = suppress_static_all(&mut records, cfg.static_iou, cfg.static_run);
    summary.entries_out = records.iter().map(|r| r.entries.len()).sum();

    let visits: Vec<Visit> = records
        .chunk_by(|a, b| a.camera_id == b.camera_id)
        .flat_map(|camera| stitch_visits(camera, cfg.stitch_gap_s))
        .collect();
    summary.tied_visits = visits.iter().filter(|v| v.species_tie).count();
    let daily = daily_counts(&visits);
    Ok(VisitsOutcome {
        visits,
        daily,
        summary,
        records,
    })
}
