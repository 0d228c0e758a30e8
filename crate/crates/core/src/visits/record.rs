//! The line-oriented detection interchange format.
//!
//! One JSON object per line:
//!
//! ```text
//! {"image": "cam02/IMG_0001.jpg", "camera_id": "cam02",
//!  "timestamp": "2024-02-01T06:30:00Z", "detector": "owlv2",
//!  "detections": [{"bbox": [10, 20, 60, 80], "confidence": 0.81,
//!                  "label": "bird", "taxon_class": "Aves"}]}
//! ```
//!
//! `bbox` is `[x_min, y_min, x_max, y_max]` in pixels and `taxon_class` is
//! optional. Blank lines are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::imgproc::BBox;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub bbox: BBox,
    pub confidence: f64,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taxon_class: Option<String>,
}

/// One detector's output for one frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRecord {
    #[serde(rename = "image")]
    pub image_path: String,
    pub camera_id: String,
    #[serde(serialize_with = "ser_ts")]
    pub timestamp: DateTime<Utc>,
    pub detector: String,
    #[serde(rename = "detections")]
    pub entries: Vec<Detection>,
}

fn ser_ts<S: serde::Serializer>(t: &DateTime<Utc>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
}

impl DetectionRecord {
    /// Serialises as one interchange line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialises")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    /// Sorted by `(camera_id, timestamp, image)`.
    pub records: Vec<DetectionRecord>,
    /// Entries discarded for confidence outside `[0, 1]` (lenient mode only).
    pub dropped_out_of_range: usize,
}

/// Parses an ISO-8601 instant; a timestamp without offset is taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .ok()
        .map(|n| n.and_utc())
}

struct Line<'a> {
    number: usize,
    obj: &'a Map<String, Value>,
}

impl Line<'_> {
    fn err(&self, field: &str, message: impl Into<String>) -> Error {
        Error::Record {
            line: self.number,
            field: field.to_owned(),
            message: message.into(),
        }
    }

    fn string(&self, field: &str) -> Result<String> {
        match self.obj.get(field) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(self.err(field, "expected a string")),
            None => Err(self.err(field, "missing")),
        }
    }
}

fn parse_entry(line: &Line<'_>, idx: usize, v: &Value) -> Result<Detection> {
    let path = |f: &str| format!("detections[{idx}].{f}");
    let obj = v
        .as_object()
        .ok_or_else(|| line.err(&format!("detections[{idx}]"), "expected an object"))?;

    let bbox = match obj.get("bbox") {
        Some(Value::Array(a)) if a.len() == 4 => {
            let mut c = [0.0; 4];
            for (slot, x) in c.iter_mut().zip(a) {
                *slot = x
                    .as_f64()
                    .ok_or_else(|| line.err(&path("bbox"), "coordinates must be numbers"))?;
            }
            let b = BBox::new(c[0], c[1], c[2], c[3]).map_err(|e| line.err(&path("bbox"), e.to_string()))?;
            if b.area() <= 0.0 {
                return Err(line.err(&path("bbox"), "box must have positive area"));
            }
            b
        }
        Some(_) => return Err(line.err(&path("bbox"), "expected [x_min, y_min, x_max, y_max]")),
        None => return Err(line.err(&path("bbox"), "missing")),
    };
    let confidence = match obj.get("confidence") {
        Some(Value::Number(n)) => n.as_f64().unwrap_or(f64::NAN),
        Some(_) => return Err(line.err(&path("confidence"), "expected a number")),
        None => return Err(line.err(&path("confidence"), "missing")),
    };
    let label = match obj.get("label") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(line.err(&path("label"), "expected a string")),
        None => return Err(line.err(&path("label"), "missing")),
    };
    let taxon_class = match obj.get("taxon_class") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(line.err(&path("taxon_class"), "expected a string or null")),
    };
    Ok(Detection {
        bbox,
        confidence,
        label,
        taxon_class,
    })
}

/// Parses interchange lines.
///
/// With `strict`, any entry whose confidence lies outside `[0, 1]` is an
/// error; otherwise such entries are dropped and counted.
pub fn parse_detections(input: impl Read, strict: bool) -> Result<LoadReport> {
    let mut report = LoadReport::default();
    for (i, text) in BufReader::new(input).lines().enumerate() {
        let number = i + 1;
        let text = text.map_err(|e| Error::Record {
            line: number,
            field: String::new(),
            message: e.to_string(),
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::Record {
            line: number,
            field: String::new(),
            message: format!("invalid JSON: {e}"),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::Record {
            line: number,
            field: String::new(),
            message: "expected a JSON object".into(),
        })?;
        let line = Line { number, obj };

        let timestamp_text = line.string("timestamp")?;
        let timestamp = parse_timestamp(&timestamp_text)
            .ok_or_else(|| line.err("timestamp", format!("unparseable instant `{timestamp_text}`")))?;
        let raw_entries = match obj.get("detections") {
            Some(Value::Array(a)) => a,
            Some(_) => return Err(line.err("detections", "expected an array")),
            None => return Err(line.err("detections", "missing")),
        };
        let mut entries = raw_entries
            .iter()
            .enumerate()
            .map(|(k, v)| parse_entry(&line, k, v))
            .collect::<Result<Vec<_>>>()?;

        let bad = entries.iter().filter(|e| !(0.0..=1.0).contains(&e.confidence)).count();
        if bad > 0 {
            if strict {
                return Err(Error::ConfidenceOutOfRange { line: number, count: bad });
            }
            entries.retain(|e| (0.0..=1.0).contains(&e.confidence));
            report.dropped_out_of_range += bad;
        }

        report.records.push(DetectionRecord {
            image_path: line.string("image")?,
            camera_id: line.string("camera_id")?,
            timestamp,
            detector: line.string("detector")?,
            entries,
        });
    }
    report.records.sort_by(|a, b| {
        (&a.camera_id, a.timestamp, &a.image_path).cmp(&(&b.camera_id, b.timestamp, &b.image_path))
    });
    Ok(report)
}

/// Loads and validates an interchange file, rejecting out-of-range
/// confidences.
pub fn load_detections(path: &Path) -> Result<Vec<DetectionRecord>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_detections(file, true)?.records)
}
