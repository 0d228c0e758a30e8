//! Density-based clustering used to flag outlying observations.
//!
//! A point is core when at least `min_pts` points (itself included) lie
//! within `eps`. Clusters are seeded from the lowest-index unassigned core
//! point and expanded breadth-first, so a border point reachable from two
//! clusters belongs to the one seeded first.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::SeriesPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Noise,
    Cluster(usize),
}

impl Label {
    pub fn is_noise(self) -> bool {
        self == Label::Noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self { eps: 0.5, min_pts: 5 }
    }
}

impl DbscanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if self.min_pts < 1 {
            return Err(Error::InvalidConfig("min_pts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-axis normalisation applied to `(t, value)` before clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    /// Centre each axis and divide by its population standard deviation
    /// (axes with zero spread are only centred).
    #[default]
    ZScore,
}

fn normalise(values: impl Iterator<Item = f64> + Clone, scaling: Scaling) -> Vec<f64> {
    match scaling {
        Scaling::None => values.collect(),
        Scaling::ZScore => {
            let v: Vec<f64> = values.collect();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            v.iter().map(|x| (x - mean) / sd).collect()
        }
    }
}

/// Clusters series points in the `(t, value)` plane.
pub fn dbscan(points: &[SeriesPoint], params: &DbscanParams, scaling: Scaling) -> Result<Vec<Label>> {
    params.validate()?;
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let ts = normalise(points.iter().map(|p| p.t), scaling);
    let vs = normalise(points.iter().map(|p| p.value), scaling);
    let coords: Vec<[f64; 2]> = ts.into_iter().zip(vs).map(|(t, v)| [t, v]).collect();
    dbscan_points(&coords, params)
}

/// Clusters raw 2-D coordinates.
pub fn dbscan_points(coords: &[[f64; 2]], params: &DbscanParams) -> Result<Vec<Label>> {
    params.validate()?;
    if coords.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("non-finite coordinate in clustering input".into()));
    }
    let index = SweepIndex::new(coords);
    let eps2 = params.eps * params.eps;

    let mut labels: Vec<Option<Label>> = vec![None; coords.len()];
    let mut next_cluster = 0;
    let mut queue = VecDeque::new();

    for seed in 0..coords.len() {
        if labels[seed].is_some() {
            continue;
        }
        let neighbours = index.within(seed, params.eps, eps2);
        if neighbours.len() < params.min_pts {
            labels[seed] = Some(Label::Noise);
            continue;
        }

        let cluster = Label::Cluster(next_cluster);
        next_cluster += 1;
        labels[seed] = Some(cluster);
        queue.clear();
        queue.extend(neighbours);

        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(Label::Noise) => {
                    // Previously rejected seed: border point of this cluster.
                    labels[j] = Some(cluster);
                    continue;
                }
                Some(_) => continue,
                None => {}
            }
            labels[j] = Some(cluster);
            let reach = index.within(j, params.eps, eps2);
            if reach.len() >= params.min_pts {
                queue.extend(reach);
            }
        }
    }

    Ok(labels.into_iter().map(|l| l.unwrap_or(Label::Noise)).collect())
}

/// Points sorted along the first axis; a neighbourhood query scans only the
/// slab `|x - x_i| <= eps`.
struct SweepIndex<'a> {
    coords: &'a [[f64; 2]],
    order: Vec<usize>,
    xs: Vec<f64>,
}

impl<'a> SweepIndex<'a> {
    fn new(coords: &'a [[f64; 2]]) -> Self {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0]).then(a.cmp(&b)));
        let xs = order.iter().map(|&i| coords[i][0]).collect();
        Self { coords, order, xs }
    }

    /// Indices within `eps` of point `i` (inclusive, `i` included), ascending.
    fn within(&self, i: usize, eps: f64, eps2: f64) -> Vec<usize> {
        let [x, y] = self.coords[i];
        let start = self.xs.partition_point(|&v| v < x - eps);
        let mut out: Vec<usize> = self.order[start..]
            .iter()
            .zip(&self.xs[start..])
            .take_while(|(_, &v)| v <= x + eps)
            .filter(|(&j, _)| {
                let [xj, yj] = self.coords[j];
                let (dx, dy) = (xj - x, yj - y);
                dx * dx + dy * dy <= eps2
            })
            .map(|(&j, _)| j)
            .collect();
        out.sort_unstable();
        out
    }
}
