//! Outlier rejection and polynomial trend fitting for metric time series.

mod dbscan;
pub(crate) mod io;
mod polyfit;
mod trend;

pub use self::dbscan::{dbscan, dbscan_points, DbscanParams, Label, Scaling};
pub use self::io::{read_series_csv, read_trend_csv, write_series_csv, write_trend_csv, SeriesRow, TrendRow};
pub use self::polyfit::{eval_poly, polyfit, r_squared};
pub use self::trend::{days_between, fit_trend, TrendFit};

/// One observation of a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    /// Days since the first observation of the series.
    pub t: f64,
    pub value: f64,
    pub frame_ref: String,
}

impl SeriesPoint {
    pub fn new(t: f64, value: f64, frame_ref: impl Into<String>) -> Self {
        Self {
            t,
            value,
            frame_ref: frame_ref.into(),
        }
    }
}
