//! Frame discovery: which images to process and when they were taken.
//!
//! If the image directory holds a `frames.csv` (`image,camera_id,timestamp`)
//! it is authoritative. Otherwise timestamps come from filenames of the form
//! `<camera>_<YYYYMMDD>_<HHMMSS>.<ext>`; files that do not fit are skipped.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, NaiveDateTime, Utc};
use phenotrap_core::visits::parse_timestamp;
use serde::Deserialize;

pub const INDEX_FILE: &str = "frames.csv";
const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Debug, Clone, PartialEq)]
pub struct FrameEntry {
    pub path: PathBuf,
    /// Path relative to the image directory, as reported in outputs.
    pub image: String,
    pub camera_id: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skip {
    pub image: String,
    pub camera_id: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct Inventory {
    /// Sorted by `(camera_id, timestamp, image)`.
    pub frames: Vec<FrameEntry>,
    pub skipped: Vec<Skip>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexRow {
    image: String,
    camera_id: String,
    timestamp: String,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// `cam01_20240201_063000.jpg` -> (`cam01`, 2024-02-01T06:30:00Z).
pub fn parse_frame_name(file_name: &str) -> Option<(String, DateTime<Utc>)> {
    let stem = Path::new(file_name).file_stem()?.to_str()?;
    let mut parts = stem.rsplitn(3, '_');
    let time = parts.next()?;
    let date = parts.next()?;
    let camera = parts.next()?;
    if camera.is_empty() || date.len() != 8 || time.len() != 6 {
        return None;
    }
    let naive = NaiveDateTime::parse_from_str(&format!("{date}{time}"), "%Y%m%d%H%M%S").ok()?;
    Some((camera.to_owned(), naive.and_utc()))
}

fn from_index(dir: &Path, index: &Path) -> Result<Inventory> {
    let mut reader = csv::Reader::from_path(index).with_context(|| format!("reading {}", index.display()))?;
    let mut inv = Inventory::default();
    for (i, row) in reader.deserialize::<IndexRow>().enumerate() {
        let line = i + 2;
        let row = row.with_context(|| format!("{}: line {line}", index.display()))?;
        let Some(timestamp) = parse_timestamp(&row.timestamp) else {
            bail!("{}: line {line}: bad timestamp `{}`", index.display(), row.timestamp);
        };
        inv.frames.push(FrameEntry {
            path: dir.join(&row.image),
            image: row.image,
            camera_id: row.camera_id,
            timestamp,
        });
    }
    Ok(inv)
}

fn from_names(dir: &Path) -> Result<Inventory> {
    let mut inv = Inventory::default();
    let listing = fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))?;
    let mut paths = Vec::new();
    for entry in listing {
        let path = entry.with_context(|| format!("listing {}", dir.display()))?.path();
        if path.is_file() && is_image(&path) {
            paths.push(path);
        }
    }
    paths.sort();
    for path in paths {
        let image = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match parse_frame_name(&image) {
            Some((camera_id, timestamp)) => inv.frames.push(FrameEntry {
                path,
                image,
                camera_id,
                timestamp,
            }),
            None => inv.skipped.push(Skip {
                image,
                camera_id: String::new(),
                reason: "filename does not match <camera>_<YYYYMMDD>_<HHMMSS>".into(),
            }),
        }
    }
    Ok(inv)
}

pub fn scan(dir: &Path) -> Result<Inventory> {
    if !dir.is_dir() {
        bail!("image directory {} does not exist", dir.display());
    }
    let index = dir.join(INDEX_FILE);
    let mut inv = if index.is_file() {
        from_index(dir, &index)?
    } else {
        from_names(dir)?
    };
    inv.frames.sort_by(|a, b| (&a.camera_id, a.timestamp, &a.image).cmp(&(&b.camera_id, b.timestamp, &b.image)));
    Ok(inv)
}
