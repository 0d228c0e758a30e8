use std::collections::BTreeMap;

use anyhow::{bail, Result};
use chrono::{DateTime, Utc};
use phenotrap_core::series::{days_between, fit_trend, SeriesPoint, SeriesRow, TrendRow};

use crate::config::SiteConfig;

pub(crate) struct Observation {
    pub image: String,
    pub camera_id: String,
    pub timestamp: DateTime<Utc>,
    pub value: f64,
}

pub(crate) struct SeriesOutput {
    pub series: Vec<SeriesRow>,
    pub trends: Vec<TrendRow>,
    /// One message per camera whose fit failed.
    pub failures: Vec<String>,
}

impl SeriesOutput {
    pub fn check(&self) -> Result<()> {
        if !self.failures.is_empty() {
            bail!("trend fit failed: {}", self.failures.join("; "));
        }
        Ok(())
    }
}

/// Fits one trend per camera. `t` is measured in days from the camera's
/// first observation.
pub(crate) fn fit_series(
    metric: &str,
    observations: &[Observation],
    site: &SiteConfig,
    degree_of: impl Fn(&crate::config::CameraConfig) -> usize,
) -> SeriesOutput {
    let mut by_camera: BTreeMap<&str, Vec<&Observation>> = BTreeMap::new();
    for o in observations {
        by_camera.entry(o.camera_id.as_str()).or_default().push(o);
    }

    let mut out = SeriesOutput {
        series: Vec::new(),
        trends: Vec::new(),
        failures: Vec::new(),
    };
    for (camera, mut obs) in by_camera {
        obs.sort_by(|a, b| (a.timestamp, &a.image).cmp(&(b.timestamp, &b.image)));
        let t0 = obs[0].timestamp;
        let points: Vec<SeriesPoint> = obs
            .iter()
            .map(|o| SeriesPoint::new(days_between(t0, o.timestamp), o.value, o.image.clone()))
            .collect();

        let cfg = site.camera(camera);
        let degree = degree_of(cfg);
        let inlier = match fit_trend(&points, degree, &cfg.dbscan, cfg.scaling) {
            Ok(fit) => {
                out.trends.push(TrendRow {
                    camera_id: camera.to_owned(),
                    metric: metric.to_owned(),
                    t0,
                    degree,
                    r_squared: fit.r_squared,
                    inlier_count: fit.inlier_count,
                    outlier_count: fit.outlier_count,
                    t_start_days: points[0].t,
                    t_end_days: points[points.len() - 1].t,
                    coefficients: fit.coefficients,
                });
                fit.inlier.into_iter().map(Some).collect()
            }
            Err(e) => {
                out.failures.push(format!("camera {camera}: {e}"));
                vec![None; obs.len()]
            }
        };
        for (o, inlier) in obs.iter().zip(inlier) {
            out.series.push(SeriesRow {
                timestamp: o.timestamp,
                value: o.value,
                camera_id: camera.to_owned(),
                metric: metric.to_owned(),
                inlier,
            });
        }
    }
    out
}
