use serde::{Deserialize, Serialize};

use super::frame::{DepthMap, Frame};
use crate::imgproc::{srgb_to_lab, BinaryMask};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreennessConfig {
    /// Pixels farther than this are background.
    pub max_depth_m: f64,
    /// A foreground pixel is green when its LAB `a` is strictly below this.
    pub green_a_max: f64,
    /// Frames whose foreground covers less than this fraction are flagged.
    pub min_foreground_fraction: f64,
}

impl Default for GreennessConfig {
    fn default() -> Self {
        Self {
            max_depth_m: 2.0,
            green_a_max: -8.0,
            min_foreground_fraction: 0.01,
        }
    }
}

impl GreennessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_depth_m.is_finite() && self.max_depth_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "max_depth_m must be positive, got {}",
                self.max_depth_m
            )));
        }
        if !(0.0..=1.0).contains(&self.min_foreground_fraction) {
            return Err(Error::InvalidConfig(format!(
                "min_foreground_fraction must lie in [0, 1], got {}",
                self.min_foreground_fraction
            )));
        }
        if self.green_a_max.is_nan() {
            return Err(Error::InvalidConfig("green_a_max is NaN".into()));
        }
        Ok(())
    }
}

/// Depth-gated foreground of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Foreground {
    pub mask: BinaryMask,
    pub fraction: f64,
    /// Set when `fraction < min_foreground_fraction`; the caller should drop
    /// the frame from the greenness series.
    pub insufficient: bool,
}

pub fn extract_foreground(frame: &Frame, depth: &DepthMap, cfg: &GreennessConfig) -> Result<Foreground> {
    cfg.validate()?;
    if frame.image.dimensions() != depth.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: frame.image.dimensions(),
            actual: depth.dimensions(),
        });
    }
    let bits = depth
        .depth_m()
        .iter()
        .zip(depth.validity())
        .map(|(&d, &valid)| valid && d <= cfg.max_depth_m)
        .collect();
    let mask = BinaryMask::from_bits(depth.width(), depth.height(), bits)?;
    let fraction = mask.fraction();
    Ok(Foreground {
        insufficient: fraction < cfg.min_foreground_fraction,
        mask,
        fraction,
    })
}

/// Fraction of foreground pixels whose LAB `a` is below `green_a_max`.
pub fn greenness_score(frame: &Frame, foreground: &BinaryMask, cfg: &GreennessConfig) -> Result<f64> {
    if frame.image.dimensions() != foreground.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: frame.image.dimensions(),
            actual: foreground.dimensions(),
        });
    }
    let (mut total, mut green) = (0usize, 0usize);
    for (&rgb, &fg) in frame.image.pixels().iter().zip(foreground.bits()) {
        if fg {
            total += 1;
            if srgb_to_lab(rgb).a < cfg.green_a_max {
                green += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::NoForeground);
    }
    Ok(green as f64 / total as f64)
}
