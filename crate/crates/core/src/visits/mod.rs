//! Detection post-processing: filtering, static false-positive suppression,
//! temporal stitching into visits and per-day counts.

mod filter;
mod io;
mod record;
mod stitch;

pub use self::filter::{filter_confidence, filter_taxon, suppress_static, suppress_static_all, TaxonReport};
pub use self::io::{read_daily_csv, write_daily_csv, write_visits_csv};
pub use self::record::{load_detections, parse_detections, parse_timestamp, Detection, DetectionRecord, LoadReport};
pub use self::stitch::{daily_counts, run_pipeline, stitch_visits, DailyCount, PipelineSummary, Visit, VisitConfig, VisitsOutcome};
