use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::imgproc::RgbImage;
use crate::{Error, Result};

/// One camera-trap image.
#[derive(Debug, Clone)]
pub struct Frame {
    pub camera_id: String,
    pub timestamp: DateTime<Utc>,
    pub image: RgbImage,
    pub image_path: String,
}

/// Per-pixel metric depth aligned with a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    depth_m: Vec<f64>,
    valid: Vec<bool>,
}

/// Optional `<stem>.depth.json` next to a depth PNG overriding its units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthSidecar {
    pub meters_per_unit: f64,
}

impl Default for DepthSidecar {
    fn default() -> Self {
        Self {
            meters_per_unit: 0.001,
        }
    }
}

/// Depth file paired with an image: `<depth_dir>/<image stem>.depth.png`.
pub fn depth_path_for(image_path: &Path, depth_dir: &Path) -> PathBuf {
    let stem = image_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    depth_dir.join(format!("{stem}.depth.png"))
}

impl DepthMap {
    /// Builds a depth map from metres; non-finite or non-positive samples
    /// are marked invalid.
    pub fn from_meters(width: u32, height: u32, depth_m: Vec<f64>) -> Result<Self> {
        if depth_m.len() != width as usize * height as usize {
            return Err(Error::InvalidImage(format!(
                "{} depth samples for a {width}x{height} map",
                depth_m.len()
            )));
        }
        let valid = depth_m.iter().map(|d| d.is_finite() && *d > 0.0).collect();
        Ok(Self {
            width,
            height,
            depth_m,
            valid,
        })
    }

    /// Raw 16-bit samples where 0 means "no estimate".
    pub fn from_raw_u16(width: u32, height: u32, raw: &[u16], sidecar: DepthSidecar) -> Result<Self> {
        if !(sidecar.meters_per_unit.is_finite() && sidecar.meters_per_unit > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "meters_per_unit must be positive, got {}",
                sidecar.meters_per_unit
            )));
        }
        let depth = raw
            .iter()
            .map(|&v| {
                if v == 0 {
                    f64::NAN
                } else {
                    f64::from(v) * sidecar.meters_per_unit
                }
            })
            .collect();
        Self::from_meters(width, height, depth)
    }

    /// Reads a 16-bit single-channel PNG (millimetres unless a
    /// `<stem>.json` sidecar sits beside it, e.g. `IMG_1.depth.json`).
    pub fn open(path: &Path) -> Result<Self> {
        let sidecar_path = path.with_extension("json");
        let sidecar = if sidecar_path.exists() {
            let text = fs::read_to_string(&sidecar_path).map_err(|source| Error::Io {
                path: sidecar_path.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| Error::Record {
                line: e.line(),
                field: "meters_per_unit".into(),
                message: format!("{}: {e}", sidecar_path.display()),
            })?
        } else {
            DepthSidecar::default()
        };

        let decoded = image::open(path).map_err(|source| Error::ImageRead {
            path: path.to_path_buf(),
            source,
        })?;
        let luma = decoded.into_luma16();
        let (w, h) = luma.dimensions();
        Self::from_raw_u16(w, h, luma.as_raw(), sidecar)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn depth_m(&self) -> &[f64] {
        &self.depth_m
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }
}
