use chrono::{DateTime, Utc};

use super::dbscan::{dbscan, DbscanParams, Scaling};
use super::polyfit::{polyfit, r_squared};
use super::SeriesPoint;
use crate::Result;

/// Polynomial trend fitted to the DBSCAN inliers of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendFit {
    pub degree: usize,
    /// Ascending powers of `t` (days).
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub inlier_count: usize,
    pub outlier_count: usize,
    /// Per input point, in input order.
    pub inlier: Vec<bool>,
}

/// Fractional days from `origin` to `t`.
pub fn days_between(origin: DateTime<Utc>, t: DateTime<Utc>) -> f64 {
    (t - origin).num_milliseconds() as f64 / 86_400_000.0
}

/// Drops DBSCAN noise, fits a polynomial to the remaining points and scores
/// it on those same points.
pub fn fit_trend(points: &[SeriesPoint], degree: usize, params: &DbscanParams, scaling: Scaling) -> Result<TrendFit> {
    let labels = dbscan(points, params, scaling)?;
    let inlier: Vec<bool> = labels.iter().map(|l| !l.is_noise()).collect();

    // Canonical order so the fit does not depend on input order.
    let mut kept: Vec<SeriesPoint> = points
        .iter()
        .zip(&inlier)
        .filter(|(_, &keep)| keep)
        .map(|(p, _)| p.clone())
        .collect();
    kept.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then(a.value.total_cmp(&b.value))
            .then_with(|| a.frame_ref.cmp(&b.frame_ref))
    });

    let coefficients = polyfit(&kept, degree)?;
    let r_squared = r_squared(&kept, &coefficients)?;
    Ok(TrendFit {
        degree,
        r_squared,
        inlier_count: kept.len(),
        outlier_count: points.len() - kept.len(),
        coefficients,
        inlier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn parabola_with_outliers() -> Vec<SeriesPoint> {
        let mut p: Vec<_> = (0..40)
            .map(|i| {
                let t = i as f64;
                SeriesPoint::new(t, 5.0 + 0.8 * t - 0.02 * t * t, format!("f{i}"))
            })
            .collect();
        p.push(SeriesPoint::new(5.5, 30.0, "o1"));
        p.push(SeriesPoint::new(20.5, -20.0, "o2"));
        p.push(SeriesPoint::new(33.5, 40.0, "o3"));
        p
    }

    #[test]
    fn outliers_rejected_before_fit() {
        let params = DbscanParams { eps: 0.5, min_pts: 4 };
        let fit = fit_trend(&parabola_with_outliers(), 2, &params, Scaling::ZScore).unwrap();
        assert_eq!(fit.outlier_count, 3);
        assert_eq!(fit.inlier_count, 40);
        assert!(fit.r_squared > 0.999);
        assert!(!fit.inlier[40] && !fit.inlier[41] && !fit.inlier[42]);
    }

    #[test]
    fn collinear_fit_is_exact() {
        let p: Vec<_> = (0..10).map(|i| SeriesPoint::new(i as f64, 1.0 + 2.0 * i as f64, "")).collect();
        let fit = fit_trend(&p, 1, &DbscanParams { eps: 10.0, min_pts: 2 }, Scaling::ZScore).unwrap();
        assert_eq!(fit.outlier_count, 0);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_noise_is_underdetermined() {
        let p: Vec<_> = (0..3).map(|i| SeriesPoint::new(i as f64, i as f64, "")).collect();
        let err = fit_trend(&p, 1, &DbscanParams::default(), Scaling::ZScore).unwrap_err();
        assert!(matches!(err, Error::UnderdeterminedFit { distinct: 0, .. }));
        assert!(fit_trend(&[], 0, &DbscanParams::default(), Scaling::ZScore).is_err());
    }

    #[test]
    fn days_are_fractional() {
        let a = Utc.with_ymd_and_hms(2024, 2, 1, 0, 0, 0).unwrap();
        let b = Utc.with_ymd_and_hms(2024, 2, 2, 12, 0, 0).unwrap();
        assert_eq!(days_between(a, b), 1.5);
    }

    proptest! {
        #[test]
        fn fit_ignores_input_order(seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let p = parabola_with_outliers();
            let mut q = p.clone();
            q.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let params = DbscanParams { eps: 0.5, min_pts: 4 };
            let a = fit_trend(&p, 2, &params, Scaling::ZScore).unwrap();
            let b = fit_trend(&q, 2, &params, Scaling::ZScore).unwrap();
            prop_assert_eq!(&a.coefficients, &b.coefficients);
            prop_assert_eq!(a.r_squared, b.r_squared);
            prop_assert_eq!(a.outlier_count, b.outlier_count);
        }
    }
}
