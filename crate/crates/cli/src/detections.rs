//! Loading interchange files and attaching classifier output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use phenotrap_core::visits::{parse_detections, DetectionRecord};

use crate::commands::warn;

/// Reads an interchange file. Without `strict`, entries whose confidence is
/// outside [0, 1] are dropped with a warning instead of failing the run.
pub fn load(path: &Path, strict: bool, diag: &mut dyn Write) -> Result<Vec<DetectionRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let report = parse_detections(BufReader::new(file), strict).with_context(|| format!("in {}", path.display()))?;
    if report.dropped_out_of_range > 0 {
        warn(
            diag,
            format_args!(
                "{}: dropped {} entr{} with confidence outside [0, 1]",
                path.display(),
                report.dropped_out_of_range,
                if report.dropped_out_of_range == 1 { "y" } else { "ies" }
            ),
        );
    }
    Ok(report.records)
}

/// The single detector named in `records`, if any.
pub fn single_detector(records: &[DetectionRecord], path: &Path) -> Result<Option<String>> {
    let mut names: Vec<&str> = records.iter().map(|r| r.detector.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    match names.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some((*one).to_owned())),
        many => bail!(
            "{}: single detector per run expected, found {}",
            path.display(),
            many.join(", ")
        ),
    }
}

/// Copies `taxon_class` and `label` from classifier records onto detector
/// records. Entries pair up by image and position; a pair whose boxes differ
/// is left unclassified (or is an error under `strict`).
pub fn merge_classifier(
    records: &mut [DetectionRecord],
    classifier: &[DetectionRecord],
    strict: bool,
    diag: &mut dyn Write,
) -> Result<()> {
    let by_image: BTreeMap<&str, &DetectionRecord> =
        classifier.iter().map(|r| (r.image_path.as_str(), r)).collect();
    let mut unpaired = 0usize;
    for record in records.iter_mut() {
        let other = by_image.get(record.image_path.as_str());
        for (i, entry) in record.entries.iter_mut().enumerate() {
            match other.and_then(|o| o.entries.get(i)) {
                Some(c) if c.bbox == entry.bbox => {
                    entry.taxon_class = c.taxon_class.clone();
                    entry.label = c.label.clone();
                }
                Some(_) if strict => {
                    bail!("classifier box for {}#{i} does not match the detector box", record.image_path)
                }
                _ => unpaired += 1,
            }
        }
    }
    if unpaired > 0 {
        if strict {
            bail!("{unpaired} detector entries have no classifier result");
        }
        warn(diag, format_args!("{unpaired} detector entries have no classifier result"));
    }
    Ok(())
}
