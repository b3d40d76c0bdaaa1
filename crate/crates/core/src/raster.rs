//! Hit-count rasters of planar clouds, written as binary PGM (P5).

use std::io::Write;

use crate::error::{Error, Result};
use crate::metricsets::{BoundingBox, PointCloud};

#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    /// Row-major, row 0 at the top.
    hits: Vec<u64>,
}

impl Raster {
    /// Bins a 2-D cloud into `width × height` pixels spanning its bounding
    /// box, with `y` growing upwards.
    pub fn from_cloud(cloud: &PointCloud, width: usize, height: usize) -> Result<Raster> {
        if cloud.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: cloud.dim() });
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidInstance("raster size must be positive".into()));
        }
        let bb = cloud.bounding_box();
        let mut r = Raster { width, height, hits: vec![0; width * height] };
        for p in cloud.points() {
            let col = bin(p[0], &bb, 0, width);
            let row = height - 1 - bin(p[1], &bb, 1, height);
            r.hits[row * width + col] += 1;
        }
        Ok(r)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn hits(&self) -> &[u64] {
        &self.hits
    }

    pub fn nonzero_fraction(&self) -> f64 {
        self.hits.iter().filter(|&&h| h > 0).count() as f64 / self.hits.len() as f64
    }

    /// Gray levels: 0 for empty pixels, otherwise `1..=255` on a log scale of the hit count.
    pub fn gray_levels(&self) -> Vec<u8> {
        let max = self.hits.iter().copied().max().unwrap_or(0);
        let denom = ((max as f64) + 1.0).ln();
        self.hits
            .iter()
            .map(|&h| {
                if h == 0 {
                    0
                } else {
                    let t = ((h as f64) + 1.0).ln() / denom;
                    (1.0 + 254.0 * t).round().clamp(1.0, 255.0) as u8
                }
            })
            .collect()
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.gray_levels())?;
        out.flush()?;
        Ok(())
    }
}

fn bin(v: f64, bb: &BoundingBox, axis: usize, n: usize) -> usize {
    let (lo, hi) = (bb.lo[axis], bb.hi[axis]);
    if hi <= lo {
        return n / 2;
    }
    let t = (v - lo) / (hi - lo);
    ((t * n as f64) as usize).min(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_land_in_corner_pixels() {
        let c = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 1.0], [1.0, 1.0]]).unwrap();
        let r = Raster::from_cloud(&c, 4, 3).unwrap();
        // bottom-left and top-right
        assert_eq!(r.hits()[2 * 4], 1);
        assert_eq!(r.hits()[3], 2);
        let g = r.gray_levels();
        assert_eq!(g[3], 255);
        assert!(g[8] >= 1 && g[8] < 255);
        assert_eq!(g.iter().filter(|&&v| v > 0).count(), 2);
    }

    #[test]
    fn pgm_header_and_size() {
        let c = PointCloud::from_rows(&[[0.0, 0.0], [2.0, 1.0]]).unwrap();
        let mut buf = Vec::new();
        Raster::from_cloud(&c, 5, 2).unwrap().write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n5 2\n255\n"));
        assert_eq!(buf.len(), "P5\n5 2\n255\n".len() + 10);
    }

    #[test]
    fn rejects_other_dimensions() {
        let c = PointCloud::new(1, vec![0.0, 1.0]).unwrap();
        assert!(matches!(Raster::from_cloud(&c, 4, 4), Err(Error::DimensionMismatch { .. })));
    }
}
