//! Least-squares polynomial fitting and the coefficient of determination.

use super::SeriesPoint;
use crate::{Error, Result};

/// Evaluates ascending-power coefficients at `t` (Horner).
pub fn eval_poly(coefficients: &[f64], t: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn distinct_count(ts: &mut [f64]) -> usize {
    ts.sort_by(f64::total_cmp);
    let mut n = 0;
    let mut last = None;
    for &t in ts.iter() {
        if last != Some(t) {
            n += 1;
            last = Some(t);
        }
    }
    n
}

/// Least-squares polynomial of the given degree, ascending powers of `t`.
///
/// The design matrix is built on `u = (t - centre) / half_range` and solved
/// by Householder QR, then mapped back to powers of `t`.
pub fn polyfit(points: &[SeriesPoint], degree: usize) -> Result<Vec<f64>> {
    if points.iter().any(|p| !p.t.is_finite() || !p.value.is_finite()) {
        return Err(Error::InvalidConfig("non-finite series point".into()));
    }
    let mut ts: Vec<f64> = points.iter().map(|p| p.t).collect();
    let distinct = distinct_count(&mut ts);
    let cols = degree + 1;
    if distinct < cols {
        return Err(Error::UnderdeterminedFit { degree, distinct });
    }

    let n = points.len();
    let (t_lo, t_hi) = (ts[0], ts[n - 1]);
    let centre = 0.5 * (t_lo + t_hi);
    let half_range = 0.5 * (t_hi - t_lo);
    let scale = if half_range > 0.0 { half_range } else { 1.0 };

    // Column-major design matrix.
    let mut a = vec![0.0; n * cols];
    for (i, p) in points.iter().enumerate() {
        let u = (p.t - centre) / scale;
        let mut pow = 1.0;
        for k in 0..cols {
            a[k * n + i] = pow;
            pow *= u;
        }
    }
    let mut rhs: Vec<f64> = points.iter().map(|p| p.value).collect();

    let scaled = householder_least_squares(&mut a, &mut rhs, n, cols)
        .ok_or(Error::UnderdeterminedFit { degree, distinct })?;
    Ok(to_monomial(&scaled, centre, scale))
}

/// Solves min ||A x - b|| in place. Returns `None` on numerical rank loss.
fn householder_least_squares(a: &mut [f64], b: &mut [f64], rows: usize, cols: usize) -> Option<Vec<f64>> {
    let col_norm0: Vec<f64> = (0..cols)
        .map(|k| a[k * rows..(k + 1) * rows].iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    for k in 0..cols {
        let norm = a[k * rows + k..(k + 1) * rows].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * col_norm0[k].max(1.0) {
            return None;
        }
        let alpha = if a[k * rows + k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored over column k.
        a[k * rows + k] -= alpha;
        let vnorm2: f64 = a[k * rows + k..(k + 1) * rows].iter().map(|v| v * v).sum();

        let reflect = |target: &mut [f64], v: &[f64]| {
            let dot: f64 = target.iter().zip(v).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm2;
            for (x, y) in target.iter_mut().zip(v) {
                *x -= f * y;
            }
        };

        let v: Vec<f64> = a[k * rows + k..(k + 1) * rows].to_vec();
        for j in k + 1..cols {
            reflect(&mut a[j * rows + k..(j + 1) * rows], &v);
        }
        reflect(&mut b[k..rows], &v);
        a[k * rows + k] = alpha;
    }

    // Back substitution on the upper triangle.
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s -= a[j * rows + k] * x[j];
        }
        x[k] = s / a[k * rows + k];
    }
    Some(x)
}

/// Rewrites `sum b_k ((t - c) / s)^k` as ascending powers of `t`.
fn to_monomial(scaled: &[f64], centre: f64, scale: f64) -> Vec<f64> {
    let m = scaled.len();
    let mut out = vec![0.0; m];
    for (k, &bk) in scaled.iter().enumerate() {
        let lead = bk / scale.powi(k as i32);
        // (t - c)^k = sum_j C(k, j) t^j (-c)^(k - j)
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += lead * binom * (-centre).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// `1 - SS_res / SS_tot` of the model over the given points.
pub fn r_squared(points: &[SeriesPoint], coefficients: &[f64]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateRSquared);
    }
    let mean = points.iter().map(|p| p.value).sum::<f64>() / points.len() as f64;
    let ss_tot: f64 = points.iter().map(|p| (p.value - mean).powi(2)).sum();
    if ss_tot <= 0.0 {
        return Err(Error::DegenerateRSquared);
    }
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.value - eval_poly(coefficients, p.t)).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}
