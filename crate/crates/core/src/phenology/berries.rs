//! Red berry counting by agreement between an HSV and a LAB segmentation.

use serde::{Deserialize, Serialize};

use crate::imgproc::{
    connected_components, morph_close, morph_open, srgb_to_hsv, srgb_to_lab, BBox, BinaryMask, Component,
    Connectivity, Interval, RgbImage,
};
use crate::{Error, Result};

/// A hue band with saturation and value floors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvRange {
    pub hue: Interval,
    pub s_min: f64,
    pub v_min: f64,
}

impl HsvRange {
    fn validate(&self) -> Result<()> {
        self.hue.validate()?;
        for (name, v) in [("s_min", self.s_min), ("v_min", self.v_min)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    fn matches(&self, rgb: [u8; 3]) -> bool {
        let hsv = srgb_to_hsv(rgb);
        self.hue.contains(hsv.h) && hsv.s >= self.s_min && hsv.v >= self.v_min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerryConfig {
    /// Reds just above 0°.
    pub hsv_red_low: HsvRange,
    /// Reds wrapping just below 360°.
    pub hsv_red_high: HsvRange,
    /// LAB `a` floor for the second segmentation.
    pub lab_a_min: f64,
    pub min_area_px2: usize,
    pub centroid_match_px: f64,
    pub morph_kernel: usize,
}

impl Default for BerryConfig {
    fn default() -> Self {
        Self {
            hsv_red_low: HsvRange {
                hue: Interval::closed(0.0, 15.0),
                s_min: 0.45,
                v_min: 0.25,
            },
            hsv_red_high: HsvRange {
                hue: Interval::half_open(345.0, 360.0),
                s_min: 0.45,
                v_min: 0.25,
            },
            lab_a_min: 25.0,
            min_area_px2: 50,
            centroid_match_px: 50.0,
            morph_kernel: 3,
        }
    }
}

impl BerryConfig {
    pub fn validate(&self) -> Result<()> {
        self.hsv_red_low.validate()?;
        self.hsv_red_high.validate()?;
        if self.lab_a_min.is_nan() {
            return Err(Error::InvalidConfig("lab_a_min is NaN".into()));
        }
        if self.min_area_px2 < 1 {
            return Err(Error::InvalidConfig("min_area_px2 must be >= 1".into()));
        }
        if !(self.centroid_match_px >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "centroid_match_px must be >= 0, got {}",
                self.centroid_match_px
            )));
        }
        if self.morph_kernel == 0 || self.morph_kernel % 2 == 0 {
            return Err(Error::InvalidKernel(self.morph_kernel));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerryDetection {
    /// One merged box per matched HSV/LAB pair.
    pub boxes: Vec<BBox>,
    pub count: usize,
}

/// Counts berries over the whole frame.
pub fn detect_berries(image: &RgbImage, cfg: &BerryConfig) -> Result<BerryDetection> {
    detect_berries_in(image, cfg, None)
}

/// Counts berries, optionally restricted to a region such as a depth
/// foreground.
pub fn detect_berries_in(image: &RgbImage, cfg: &BerryConfig, region: Option<&BinaryMask>) -> Result<BerryDetection> {
    cfg.validate()?;
    if let Some(r) = region {
        if r.dimensions() != image.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: image.dimensions(),
                actual: r.dimensions(),
            });
        }
    }
    let inside = |i: usize| region.map_or(true, |r| r.bits()[i]);

    let (w, h) = image.dimensions();
    let mut hsv_bits = Vec::with_capacity(image.pixels().len());
    let mut lab_bits = Vec::with_capacity(image.pixels().len());
    for (i, &rgb) in image.pixels().iter().enumerate() {
        let keep = inside(i);
        hsv_bits.push(keep && (cfg.hsv_red_low.matches(rgb) || cfg.hsv_red_high.matches(rgb)));
        lab_bits.push(keep && srgb_to_lab(rgb).a >= cfg.lab_a_min);
    }

    let blobs = |bits: Vec<bool>| -> Result<Vec<Component>> {
        let mask = BinaryMask::from_bits(w, h, bits)?;
        let cleaned = morph_close(&morph_open(&mask, cfg.morph_kernel)?, cfg.morph_kernel)?;
        Ok(connected_components(&cleaned, Connectivity::Eight)
            .into_iter()
            .filter(|c| c.area >= cfg.min_area_px2)
            .collect())
    };
    let hsv = blobs(hsv_bits)?;
    let lab = blobs(lab_bits)?;

    let boxes: Vec<BBox> = match_centroids(&hsv, &lab, cfg.centroid_match_px)
        .into_iter()
        .map(|(i, j)| hsv[i].bbox.union(&lab[j].bbox))
        .collect();
    Ok(BerryDetection {
        count: boxes.len(),
        boxes,
    })
}

/// Greedy one-to-one matching by ascending centroid distance. Ties go to the
/// earlier HSV component, then the earlier LAB component.
fn match_centroids(hsv: &[Component], lab: &[Component], max_dist: f64) -> Vec<(usize, usize)> {
    let mut candidates = Vec::new();
    for (i, a) in hsv.iter().enumerate() {
        for (j, b) in lab.iter().enumerate() {
            let d = (a.centroid.0 - b.centroid.0).hypot(a.centroid.1 - b.centroid.1);
            if d <= max_dist {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut hsv_used = vec![false; hsv.len()];
    let mut lab_used = vec![false; lab.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !hsv_used[i] && !lab_used[j] {
            hsv_used[i] = true;
            lab_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    pairs
}
