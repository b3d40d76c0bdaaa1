//! Uniform-grid nearest-neighbour search.
//!
//! Queries are projected onto the indexed cloud's bounding box and visit
//! cells in Chebyshev shells around the projected cell. Since every indexed
//! point lies in the box, `|x − y|² ≥ |x − p|² + |p − y|²` for the projection
//! `p`, and cells beyond shell `r` are at least `r·cell` from `p` up to
//! rounding. The search stops once the best distance is within that bound,
//! so the minimum is always taken over a superset of the true candidates.

use std::collections::HashMap;

use super::{distance, BoundingBox, PointCloud};

enum Cells {
    /// CSR offsets over every cell of the grid.
    Dense(Vec<u32>),
    /// cell key -> range into `order`
    Sparse(HashMap<u128, (u32, u32)>),
}

pub(super) struct GridIndex<'a> {
    cloud: &'a PointCloud,
    bbox: BoundingBox,
    cell: f64,
    /// Allowance for floor() landing a point one cell over near a boundary.
    slack: f64,
    dims: Vec<i64>,
    strides: Vec<u128>,
    cells: Cells,
    order: Vec<u32>,
}

pub(super) struct Scratch {
    projected: Vec<f64>,
    center: Vec<i64>,
    offset: Vec<i64>,
    cell: Vec<i64>,
}

impl Scratch {
    pub(super) fn new(dim: usize) -> Self {
        Self { projected: vec![0.0; dim], center: vec![0; dim], offset: vec![0; dim], cell: vec![0; dim] }
    }
}

impl<'a> GridIndex<'a> {
    /// `None` when the key space does not fit a `u128`.
    pub(super) fn build(cloud: &'a PointCloud) -> Option<Self> {
        let m = cloud.dim();
        let n = cloud.len();
        let bbox = cloud.bounding_box();
        let extent = bbox.extent();
        let max_extent = extent.iter().cloned().fold(0.0, f64::max);
        let per_axis = (n as f64).powf(1.0 / m as f64).ceil().max(1.0);
        let mut cell = max_extent / per_axis;
        if !(cell > 0.0 && cell.is_finite()) {
            cell = 1.0;
        }
        let magnitude = bbox.lo.iter().chain(&bbox.hi).fold(0.0f64, |acc, v| acc.max(v.abs()));
        let slack = 1e-9 * cell + 1e-12 * magnitude;
        let dims: Vec<i64> = extent.iter().map(|e| (e / cell).floor() as i64 + 1).collect();
        let mut strides = Vec::with_capacity(m);
        let mut total: u128 = 1;
        for &d in &dims {
            strides.push(total);
            total = total.checked_mul(d as u128)?;
        }

        let mut index =
            Self { cloud, bbox, cell, slack, dims, strides, cells: Cells::Sparse(HashMap::new()), order: Vec::new() };
        let mut keyed: Vec<(u128, u32)> = Vec::with_capacity(n);
        let mut c = vec![0i64; m];
        for (i, p) in cloud.points().enumerate() {
            index.cell_of(p, &mut c);
            keyed.push((index.key(&c), i as u32));
        }
        keyed.sort_unstable();
        if total <= 8 * n as u128 + 64 {
            let mut offsets = vec![0u32; total as usize + 1];
            for &(k, _) in &keyed {
                offsets[k as usize + 1] += 1;
            }
            for i in 1..offsets.len() {
                offsets[i] += offsets[i - 1];
            }
            index.cells = Cells::Dense(offsets);
        } else {
            let mut map = HashMap::new();
            let mut start = 0;
            while start < keyed.len() {
                let k = keyed[start].0;
                let mut end = start;
                while end < keyed.len() && keyed[end].0 == k {
                    end += 1;
                }
                map.insert(k, (start as u32, end as u32));
                start = end;
            }
            index.cells = Cells::Sparse(map);
        }
        index.order = keyed.into_iter().map(|(_, i)| i).collect();
        Some(index)
    }

    fn cell_of(&self, p: &[f64], out: &mut [i64]) {
        for j in 0..p.len() {
            let raw = ((p[j] - self.bbox.lo[j]) / self.cell).floor() as i64;
            out[j] = raw.clamp(0, self.dims[j] - 1);
        }
    }

    fn key(&self, c: &[i64]) -> u128 {
        c.iter().zip(&self.strides).map(|(&ci, &s)| ci as u128 * s).sum()
    }

    fn scan_cell(&self, c: &[i64], x: &[f64], best: &mut f64) {
        let key = self.key(c);
        let range = match &self.cells {
            Cells::Dense(offsets) => {
                let k = key as usize;
                (offsets[k], offsets[k + 1])
            }
            Cells::Sparse(map) => match map.get(&key) {
                Some(&r) => r,
                None => return,
            },
        };
        for &i in &self.order[range.0 as usize..range.1 as usize] {
            let d = distance(x, self.cloud.point(i as usize));
            if d < *best {
                *best = d;
            }
        }
    }

    pub(super) fn nearest_distance(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        let m = x.len();
        self.bbox.project(x, &mut scratch.projected);
        let projected = std::mem::take(&mut scratch.projected);
        self.cell_of(&projected, &mut scratch.center);
        let outside = distance(x, &projected);
        scratch.projected = projected;
        let outside_sq = outside * outside;

        let max_ring = (0..m).map(|j| scratch.center[j].max(self.dims[j] - 1 - scratch.center[j])).max().unwrap_or(0);

        let mut best = f64::INFINITY;
        let mut cell = std::mem::take(&mut scratch.cell);
        for r in 0..=max_ring {
            self.scan_shell(r, x, &scratch.center, &mut scratch.offset, &mut cell, &mut best);
            let reach = (r as f64 * self.cell - 2.0 * self.slack).max(0.0);
            let bound = (outside_sq + reach * reach) * (1.0 - 1e-12);
            if best * best <= bound {
                break;
            }
        }
        scratch.cell = cell;
        best
    }

    /// Visits every in-bounds cell at Chebyshev distance exactly `r` from
    /// `center`, each once: axis `j` is the first with `|offset| = r`.
    fn scan_shell(&self, r: i64, x: &[f64], center: &[i64], offset: &mut [i64], cell: &mut [i64], best: &mut f64) {
        let m = x.len();
        if r == 0 {
            self.scan_cell(center, x, best);
            return;
        }
        let range = |j: usize, k: usize| -> (i64, i64) {
            let span = if k < j { r - 1 } else { r };
            ((center[k] - span).max(0), (center[k] + span).min(self.dims[k] - 1))
        };
        for j in 0..m {
            for sign in [-1i64, 1] {
                let cj = center[j] + sign * r;
                if cj < 0 || cj >= self.dims[j] {
                    continue;
                }
                let mut empty = false;
                for k in 0..m {
                    if k == j {
                        offset[k] = cj;
                        continue;
                    }
                    let (lo, hi) = range(j, k);
                    if lo > hi {
                        empty = true;
                    }
                    offset[k] = lo;
                }
                if empty {
                    continue;
                }
                loop {
                    cell.copy_from_slice(offset);
                    self.scan_cell(cell, x, best);
                    // odometer over axes != j
                    let mut k = 0;
                    while k < m {
                        if k == j {
                            k += 1;
                            continue;
                        }
                        let (lo, hi) = range(j, k);
                        if offset[k] < hi {
                            offset[k] += 1;
                            break;
                        }
                        offset[k] = lo;
                        k += 1;
                    }
                    if k == m {
                        break;
                    }
                }
            }
        }
    }
}
