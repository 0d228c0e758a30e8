use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::visits::{
    filter_confidence, filter_taxon, suppress_static_all, Detection, DetectionRecord, VisitConfig,
};
use crate::{Error, Result};

use super::matching::{match_detections, prf};

/// Post-processing applied to predictions before matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Confidence floor only.
    Only,
    /// Confidence floor, then the taxon filter.
    Taxon,
    /// Confidence floor, taxon filter, static suppression.
    TaxonStatic,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Only => "only",
            Stage::Taxon => "taxon",
            Stage::TaxonStatic => "taxon_static",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub detector: String,
    pub stage: Stage,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn by_image(records: &[DetectionRecord]) -> BTreeMap<String, Vec<Detection>> {
    let mut map: BTreeMap<String, Vec<Detection>> = BTreeMap::new();
    for r in records {
        map.entry(r.image_path.clone()).or_default().extend(r.entries.iter().cloned());
    }
    map
}

/// Scores every detector found in `pred` against `gt`.
///
/// Each detector gets an `only` row. The `taxon` and `taxon_static` rows are
/// added when that detector's entries carry a taxon class.
pub fn evaluate_stages(
    pred: &[DetectionRecord],
    gt: &[DetectionRecord],
    cfg: &VisitConfig,
    iou_min: f64,
) -> Result<Vec<EvalRow>> {
    cfg.validate()?;
    if gt.is_empty() {
        return Err(Error::EmptyGroundTruth("no annotated images".into()));
    }
    if gt.iter().all(|r| r.entries.is_empty()) {
        return Err(Error::EmptyGroundTruth("no annotated boxes".into()));
    }
    let truth = by_image(gt);

    let detectors: BTreeSet<&str> = pred.iter().map(|r| r.detector.as_str()).collect();
    let mut rows = Vec::new();
    for detector in detectors {
        let mut records: Vec<DetectionRecord> =
            pred.iter().filter(|r| r.detector == detector).cloned().collect();
        records.sort_by(|a, b| {
            (&a.camera_id, a.timestamp, &a.image_path).cmp(&(&b.camera_id, b.timestamp, &b.image_path))
        });
        let has_taxon = records.iter().flat_map(|r| &r.entries).any(|e| e.taxon_class.is_some());

        let mut push = |stage: Stage, records: &[DetectionRecord]| -> Result<()> {
            let m = match_detections(&by_image(records), &truth, iou_min)?;
            let s = prf(&m);
            rows.push(EvalRow {
                detector: detector.to_owned(),
                stage,
                tp: m.tp,
                fp: m.fp,
                fn_: m.fn_,
                precision: s.precision,
                recall: s.recall,
                f1: s.f1,
            });
            Ok(())
        };

        filter_confidence(&mut records, cfg.confidence_min);
        push(Stage::Only, &records)?;
        if has_taxon {
            filter_taxon(&mut records, &cfg.taxon_keep);
            push(Stage::Taxon, &records)?;
            suppress_static_all(&mut records, cfg.static_iou, cfg.static_run);
            push(Stage::TaxonStatic, &records)?;
        }
    }
    Ok(rows)
}

/// Header: `detector,stage,tp,fp,fn,precision,recall,f1`.
pub fn write_eval_csv<W: Write>(out: W, rows: &[EvalRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["detector", "stage", "tp", "fp", "fn", "precision", "recall", "f1"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
