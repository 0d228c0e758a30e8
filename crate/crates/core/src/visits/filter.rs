use std::collections::BTreeSet;

use super::record::DetectionRecord;
use crate::imgproc::iou;

/// Drops entries below `confidence_min` (inclusive threshold). Records left
/// without entries are kept. Returns the number of entries dropped.
pub fn filter_confidence(records: &mut [DetectionRecord], confidence_min: f64) -> usize {
    let mut dropped = 0;
    for r in records {
        let before = r.entries.len();
        r.entries.retain(|e| e.confidence >= confidence_min);
        dropped += before - r.entries.len();
    }
    dropped
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TaxonReport {
    /// Entries classified outside the kept set.
    pub dropped_other: usize,
    /// Entries with no classification at all.
    pub dropped_missing: usize,
}

/// Keeps only entries whose `taxon_class` is in `keep`.
pub fn filter_taxon(records: &mut [DetectionRecord], keep: &BTreeSet<String>) -> TaxonReport {
    let mut report = TaxonReport::default();
    for r in records {
        r.entries.retain(|e| match &e.taxon_class {
            Some(t) if keep.contains(t) => true,
            Some(_) => {
                report.dropped_other += 1;
                false
            }
            None => {
                report.dropped_missing += 1;
                false
            }
        });
    }
    report
}

/// Removes stuck detections from one camera's time-sorted records.
///
/// Entries in consecutive records are chained when their IoU exceeds
/// `static_iou`. Every entry lying on a chain spanning at least `static_run`
/// consecutive records is removed. Returns the number removed.
pub fn suppress_static(records: &mut [DetectionRecord], static_iou: f64, static_run: usize) -> usize {
    let n = records.len();
    if n == 0 || static_run == 0 {
        return 0;
    }
    let linked = |a: usize, ea: usize, b: usize, eb: usize| {
        iou(&records[a].entries[ea].bbox, &records[b].entries[eb].bbox) > static_iou
    };

    // Longest chain ending at / starting from each entry.
    let mut ending: Vec<Vec<usize>> = records.iter().map(|r| vec![1; r.entries.len()]).collect();
    for i in 1..n {
        for e in 0..records[i].entries.len() {
            let best = (0..records[i - 1].entries.len())
                .filter(|&p| linked(i - 1, p, i, e))
                .map(|p| ending[i - 1][p])
                .max();
            if let Some(b) = best {
                ending[i][e] = b + 1;
            }
        }
    }
    let mut starting: Vec<Vec<usize>> = records.iter().map(|r| vec![1; r.entries.len()]).collect();
    for i in (0..n.saturating_sub(1)).rev() {
        for e in 0..records[i].entries.len() {
            let best = (0..records[i + 1].entries.len())
                .filter(|&q| linked(i, e, i + 1, q))
                .map(|q| starting[i + 1][q])
                .max();
            if let Some(b) = best {
                starting[i][e] = b + 1;
            }
        }
    }

    let mut removed = 0;
    for (i, r) in records.iter_mut().enumerate() {
        let mut k = 0;
        r.entries.retain(|_| {
            let on_run = ending[i][k] + starting[i][k] - 1 >= static_run;
            k += 1;
            if on_run {
                removed += 1;
            }
            !on_run
        });
    }
    removed
}

/// Applies [`suppress_static`] per camera to records sorted by
/// `(camera_id, timestamp)`.
pub fn suppress_static_all(records: &mut [DetectionRecord], static_iou: f64, static_run: usize) -> usize {
    let mut removed = 0;
    for chunk in records.chunk_by_mut(|a, b| a.camera_id == b.camera_id) {
        removed += suppress_static(chunk, static_iou, static_run);
    }
    removed
}
