use super::PointCloud;

/// Monotone-chain hull of a planar cloud. With `keep_collinear`, boundary
/// points on hull edges stay, so every farthest pair of the input survives
/// bit for bit; without it only the corners remain.
pub(super) fn hull_2d(a: &PointCloud, keep_collinear: bool) -> PointCloud {
    let mut pts: Vec<[f64; 2]> = a.points().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return PointCloud::from_rows(&pts).expect("non-empty");
    }

    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        let c = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        if keep_collinear {
            c < 0.0
        } else {
            c <= 0.0
        }
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    PointCloud::from_rows(&hull).expect("non-empty")
}
