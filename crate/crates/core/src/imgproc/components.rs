//! Connected-component labelling of binary masks.

use super::geometry::BBox;
use super::mask::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// A maximal connected set of foreground pixels.
///
/// Pixel `(x, y)` covers `[x, x+1) × [y, y+1)`, so the centroid of a 3×3 block
/// at the origin is `(1.5, 1.5)` and the bounding box is `[0, 0, 3, 3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub area: usize,
    pub centroid: (f64, f64),
    pub bbox: BBox,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn make(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the older label as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Default)]
struct Accum {
    area: usize,
    sum_x: f64,
    sum_y: f64,
    x_min: u32,
    y_min: u32,
    x_max: u32,
    y_max: u32,
}

/// Two-pass labelling. Components are returned in scanline order of their
/// first pixel.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Component> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut labels = vec![usize::MAX; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if !bits[idx] {
                continue;
            }
            let mut neighbours = [usize::MAX; 4];
            if x > 0 {
                neighbours[0] = labels[idx - 1];
            }
            if y > 0 {
                neighbours[1] = labels[idx - w];
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        neighbours[2] = labels[idx - w - 1];
                    }
                    if x + 1 < w {
                        neighbours[3] = labels[idx - w + 1];
                    }
                }
            }
            let mut label = usize::MAX;
            for &n in neighbours.iter().filter(|&&n| n != usize::MAX) {
                if label == usize::MAX {
                    label = n;
                } else {
                    sets.union(label, n);
                }
            }
            if label == usize::MAX {
                label = sets.make();
            }
            labels[idx] = label;
        }
    }

    // Roots are the smallest provisional label in each set, and provisional
    // labels are allocated in scanline order, so ordering by root preserves
    // first-pixel order.
    let mut slot_of_root = vec![usize::MAX; sets.parent.len()];
    let mut accums: Vec<Accum> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let label = labels[y * w + x];
            if label == usize::MAX {
                continue;
            }
            let root = sets.find(label);
            if slot_of_root[root] == usize::MAX {
                slot_of_root[root] = accums.len();
                accums.push(Accum {
                    x_min: x as u32,
                    y_min: y as u32,
                    x_max: x as u32,
                    y_max: y as u32,
                    ..Accum::default()
                });
            }
            let acc = &mut accums[slot_of_root[root]];
            acc.area += 1;
            acc.sum_x += x as f64;
            acc.sum_y += y as f64;
            acc.x_min = acc.x_min.min(x as u32);
            acc.x_max = acc.x_max.max(x as u32);
            acc.y_max = acc.y_max.max(y as u32);
        }
    }

    accums
        .into_iter()
        .map(|a| Component {
            area: a.area,
            centroid: (
                a.sum_x / a.area as f64 + 0.5,
                a.sum_y / a.area as f64 + 0.5,
            ),
            bbox: BBox {
                x_min: f64::from(a.x_min),
                y_min: f64::from(a.y_min),
                x_max: f64::from(a.x_max) + 1.0,
                y_max: f64::from(a.y_max) + 1.0,
            },
        })
        .collect()
}
