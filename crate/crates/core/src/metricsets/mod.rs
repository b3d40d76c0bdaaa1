//! Finite point clouds in R^m standing in for bounded closed sets.
//!
//! Distances are Euclidean. The brute-force kernels are the reference; the
//! grid-accelerated nearest-neighbour path in [`grid`] returns bit-identical
//! values because it evaluates the same distance expression on a superset
//! of the candidates that can realize the minimum.

mod convex;
mod csv_io;
mod grid;

use std::collections::HashSet;
use std::ops::Deref;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use csv_io::{read_cloud, read_cloud_file, write_cloud, write_cloud_file};

/// Below this many point pairs the brute-force kernel is used directly.
const BRUTE_FORCE_PAIRS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn format_coord(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn expanded(&self, margin: f64) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().map(|v| v - margin).collect(),
            hi: self.hi.iter().map(|v| v + margin).collect(),
        }
    }

    pub fn extent(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// The `2^m` corners as a cloud (duplicates kept when the box is flat).
    pub fn corners(&self) -> PointCloud {
        let m = self.dim();
        let mut coords = Vec::with_capacity(m << m);
        for mask in 0..(1usize << m) {
            for j in 0..m {
                coords.push(if mask >> j & 1 == 1 { self.hi[j] } else { self.lo[j] });
            }
        }
        PointCloud { dim: m, coords }
    }

    pub fn project(&self, x: &[f64], out: &mut [f64]) {
        for j in 0..x.len() {
            out[j] = x[j].clamp(self.lo[j], self.hi[j]);
        }
    }
}

/// A non-empty finite set of points sharing one dimension, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
        }
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyCloud)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    pub fn singleton(p: &[f64]) -> Result<Self> {
        Self::new(p.len(), p.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: dim })
        }
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for p in self.points() {
            for j in 0..self.dim {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        BoundingBox { lo, hi }
    }

    /// Applies `f` to every point, keeping order.
    pub fn try_map<F>(&self, out_dim: usize, mut f: F) -> Result<PointCloud>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<()>,
    {
        let mut coords = vec![0.0; self.len() * out_dim];
        for (p, out) in self.points().zip(coords.chunks_exact_mut(out_dim)) {
            f(p, out)?;
        }
        PointCloud::new(out_dim, coords)
    }

    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        self.check_dim(other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointCloud { dim: self.dim, coords })
    }

    /// Dedup on a grid of cell size `delta`; the first point in a cell wins.
    pub fn snapped(&self, delta: f64) -> PointCloud {
        let mut acc = CloudBuilder::new(self.dim, Some(delta));
        acc.extend(self);
        acc.finish().expect("non-empty input")
    }

    pub fn diameter(&self) -> f64 {
        diameter(self)
    }
}

/// Incremental cloud construction with optional grid dedup.
#[derive(Debug)]
pub struct CloudBuilder {
    dim: usize,
    delta: Option<f64>,
    seen: HashSet<Vec<i64>>,
    key: Vec<i64>,
    coords: Vec<f64>,
}

impl CloudBuilder {
    /// `delta` of `None` (or non-positive) disables dedup.
    pub fn new(dim: usize, delta: Option<f64>) -> Self {
        Self { dim, delta: delta.filter(|d| *d > 0.0), seen: HashSet::new(), key: vec![0; dim], coords: Vec::new() }
    }

    pub fn push(&mut self, p: &[f64]) -> bool {
        debug_assert_eq!(p.len(), self.dim);
        if let Some(delta) = self.delta {
            for (k, x) in self.key.iter_mut().zip(p) {
                *k = (x / delta).floor() as i64;
            }
            if self.seen.contains(&self.key) {
                return false;
            }
            self.seen.insert(self.key.clone());
        }
        self.coords.extend_from_slice(p);
        true
    }

    pub fn extend(&mut self, cloud: &PointCloud) {
        for p in cloud.points() {
            self.push(p);
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn finish(self) -> Result<PointCloud> {
        PointCloud::new(self.dim, self.coords)
    }
}

pub fn diameter_brute(a: &PointCloud) -> f64 {
    (0..a.len())
        .into_par_iter()
        .map(|i| {
            let p = a.point(i);
            (i + 1..a.len()).map(|j| distance(p, a.point(j))).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest pairwise distance; 0 for singletons.
pub fn diameter(a: &PointCloud) -> f64 {
    match a.dim() {
        1 => {
            let bb = a.bounding_box();
            distance(&bb.lo, &bb.hi)
        }
        2 if a.len() > 64 => {
            let hull = convex::hull_2d(a, true);
            diameter_brute(&hull)
        }
        _ => diameter_brute(a),
    }
}

/// `d(x, A) = min_{y ∈ A} d(x, y)`.
/// A subset with the same convex hull (so every affine image has the same
/// diameter). Exact reduction in one and two dimensions, identity otherwise.
pub fn extreme_points(a: &PointCloud) -> PointCloud {
    match a.dim() {
        1 => {
            let bb = a.bounding_box();
            PointCloud::new(1, vec![bb.lo[0], bb.hi[0]]).expect("finite bounds")
        }
        2 if a.len() > 3 => convex::hull_2d(a, false),
        _ => a.clone(),
    }
}

pub fn point_set_distance(x: &[f64], a: &PointCloud) -> Result<f64> {
    a.check_dim(x.len())?;
    Ok(a.points().map(|y| distance(x, y)).fold(f64::INFINITY, f64::min))
}

pub fn directed_hausdorff_brute(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    a.check_dim(b.dim())?;
    Ok((0..a.len())
        .into_par_iter()
        .map(|i| {
            let x = a.point(i);
            b.points().map(|y| distance(x, y)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max))
}

/// `sup_{x ∈ A} d(x, B)`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    a.check_dim(b.dim())?;
    if a.len().saturating_mul(b.len()) <= BRUTE_FORCE_PAIRS {
        return directed_hausdorff_brute(a, b);
    }
    match grid::GridIndex::build(b) {
        Some(index) => Ok((0..a.len())
            .into_par_iter()
            .map_init(|| grid::Scratch::new(b.dim()), |scratch, i| index.nearest_distance(a.point(i), scratch))
            .reduce(|| 0.0, f64::max)),
        None => directed_hausdorff_brute(a, b),
    }
}

pub fn hausdorff_brute(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_hausdorff_brute(a, b)?.max(directed_hausdorff_brute(b, a)?))
}

/// Hausdorff-Pompeiu distance between two clouds.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// True iff every point of `a` lies strictly within `eps` of some point of `b`.
pub fn within_dilation(a: &PointCloud, b: &PointCloud, eps: f64) -> Result<bool> {
    Ok(directed_hausdorff(a, b)? < eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c1(xs: &[f64]) -> PointCloud {
        PointCloud::new(1, xs.to_vec()).unwrap()
    }

    fn random_cloud(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> PointCloud {
        let coords = (0..dim * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        PointCloud::new(dim, coords).unwrap()
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(c1(&[0.0]).diameter(), 0.0);
        assert_eq!(c1(&[0.0, 1.0]).diameter(), 1.0);
        let tri = PointCloud::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(tri.diameter(), 5.0);
    }

    #[test]
    fn point_set_distance_examples() {
        let a = c1(&[0.0, 1.0]);
        assert_eq!(point_set_distance(&[0.0], &a).unwrap(), 0.0);
        assert_eq!(point_set_distance(&[2.0], &a).unwrap(), 1.0);
        assert_eq!(point_set_distance(&[0.5], &a).unwrap(), 0.5);
        assert!(matches!(point_set_distance(&[0.0, 0.0], &a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hausdorff_examples() {
        let ab = c1(&[0.0, 1.0]);
        assert_eq!(hausdorff(&ab, &ab).unwrap(), 0.0);
        assert_eq!(hausdorff(&c1(&[0.0]), &ab).unwrap(), 1.0);
        assert_eq!(hausdorff(&c1(&[0.0, 2.0]), &c1(&[1.0])).unwrap(), 1.0);
        let p2 = PointCloud::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(hausdorff(&ab, &p2).is_err());
    }

    #[test]
    fn within_dilation_examples() {
        assert!(within_dilation(&c1(&[0.0]), &c1(&[0.5]), 1.0).unwrap());
        assert!(!within_dilation(&c1(&[0.0]), &c1(&[2.0]), 1.0).unwrap());
        assert!(within_dilation(&c1(&[0.0, 1.0]), &c1(&[0.0]), 1.1).unwrap());
        // strict inequality
        assert!(!within_dilation(&c1(&[0.0, 1.0]), &c1(&[0.0]), 1.0).unwrap());
    }

    #[test]
    fn cloud_validation() {
        assert!(matches!(PointCloud::new(2, vec![]), Err(Error::EmptyCloud)));
        assert!(matches!(PointCloud::new(2, vec![1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(PointCloud::new(1, vec![f64::NAN]), Err(Error::NonFinite)));
        assert!(matches!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite)));
    }

    #[test]
    fn snapping_keeps_first_point_per_cell() {
        let c = c1(&[0.01, 0.02, 0.5, 0.013, 0.51]);
        let s = c.snapped(0.1);
        assert_eq!(s.coords(), &[0.01, 0.5]);
        // snapping moves nothing farther than one cell diagonal
        assert!(hausdorff(&c, &s).unwrap() <= 0.1);
    }

    #[test]
    fn grid_path_matches_brute_force_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..=3 {
            for &(na, nb) in &[(300, 200), (1000, 50), (40, 900)] {
                let a = random_cloud(&mut rng, dim, na);
                let mut b = random_cloud(&mut rng, dim, nb);
                if dim == 2 {
                    // clustered target with a far outlier query set
                    b = b
                        .try_map(2, |p, out| {
                            out[0] = p[0] * 0.01;
                            out[1] = p[1] * 0.01 + 0.5;
                            Ok(())
                        })
                        .unwrap();
                }
                let fast = directed_hausdorff(&a, &b).unwrap();
                let slow = directed_hausdorff_brute(&a, &b).unwrap();
                assert_eq!(fast.to_bits(), slow.to_bits(), "dim={dim} na={na} nb={nb}");
            }
        }
    }

    #[test]
    fn fast_diameter_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 1..=3 {
            for n in [1, 2, 65, 500] {
                let a = random_cloud(&mut rng, dim, n);
                assert_eq!(diameter(&a).to_bits(), diameter_brute(&a).to_bits(), "dim={dim} n={n}");
            }
        }
        // collinear points in the plane
        let line: Vec<[f64; 2]> = (0..200).map(|k| [k as f64 * 0.5, k as f64 * 0.25]).collect();
        let line = PointCloud::from_rows(&line).unwrap();
        assert_eq!(diameter(&line), diameter_brute(&line));
    }

    #[test]
    fn corners_of_box() {
        let bb = BoundingBox { lo: vec![0.0, -1.0], hi: vec![2.0, 1.0] };
        let c = bb.corners();
        assert_eq!(c.len(), 4);
        assert_eq!(c.bounding_box(), bb);
    }
}
