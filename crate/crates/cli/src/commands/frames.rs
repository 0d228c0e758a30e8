use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use phenotrap_core::imgproc::RgbImage;
use phenotrap_core::phenology::{depth_path_for, DepthMap, Frame};
use rayon::prelude::*;

use super::{warn, write_output, RunOptions};
use crate::ingest::{FrameEntry, Inventory, Skip};

/// Inputs shared by the image-based commands.
#[derive(Debug, Clone)]
pub struct FrameArgs {
    pub images: PathBuf,
    /// Defaults to the image directory.
    pub depth_dir: Option<PathBuf>,
    pub out: PathBuf,
}

impl FrameArgs {
    pub(crate) fn depth_dir(&self) -> &Path {
        self.depth_dir.as_deref().unwrap_or(&self.images)
    }
}

pub(crate) enum Outcome<T> {
    Value(T),
    Skip(String),
}

pub(crate) fn load_frame(entry: &FrameEntry) -> Result<Frame> {
    Ok(Frame {
        camera_id: entry.camera_id.clone(),
        timestamp: entry.timestamp,
        image: RgbImage::open(&entry.path)?,
        image_path: entry.image.clone(),
    })
}

/// `Ok(None)` when the depth map is absent and `strict` is off.
pub(crate) fn load_depth(entry: &FrameEntry, depth_dir: &Path, strict: bool) -> Result<Option<DepthMap>> {
    let path = depth_path_for(&entry.path, depth_dir);
    if !path.is_file() {
        if strict {
            bail!("missing depth map {} for {}", path.display(), entry.image);
        }
        return Ok(None);
    }
    Ok(Some(DepthMap::open(&path)?))
}

/// Runs `work` over every frame on the pool. Results keep input order and
/// the first failing frame (in input order) decides the error.
pub(crate) fn process<T, F>(opts: &RunOptions, frames: &[FrameEntry], work: F) -> Result<Vec<Outcome<T>>>
where
    T: Send,
    F: Fn(&FrameEntry) -> Result<Outcome<T>> + Sync,
{
    let pool = opts.pool()?;
    let results: Vec<Result<Outcome<T>>> = pool.install(|| frames.par_iter().map(&work).collect());
    results.into_iter().collect()
}

/// Splits outcomes into values and skips, reporting skips as warnings.
pub(crate) fn partition<'a, T>(
    inventory: &'a Inventory,
    outcomes: Vec<Outcome<T>>,
    diag: &mut dyn Write,
) -> (Vec<(&'a FrameEntry, T)>, Vec<Skip>) {
    let mut skipped = inventory.skipped.clone();
    let mut values = Vec::new();
    for (entry, outcome) in inventory.frames.iter().zip(outcomes) {
        match outcome {
            Outcome::Value(v) => values.push((entry, v)),
            Outcome::Skip(reason) => skipped.push(Skip {
                image: entry.image.clone(),
                camera_id: entry.camera_id.clone(),
                reason,
            }),
        }
    }
    for s in &skipped {
        warn(diag, format_args!("skipped {}: {}", s.image, s.reason));
    }
    (values, skipped)
}

/// `image,camera_id,reason`
pub(crate) fn write_skipped(out: &Path, name: &str, skipped: &[Skip]) -> Result<PathBuf> {
    write_output(out, name, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["image", "camera_id", "reason"])?;
        for s in skipped {
            w.write_record([&s.image, &s.camera_id, &s.reason])?;
        }
        w.flush()?;
        Ok(())
    })
}
