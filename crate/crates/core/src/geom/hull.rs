//! Volume of the 3D convex hull of a point set by incremental hull
//! construction.

use std::collections::HashSet;

use super::{PointCloud3, Vec3, RELATIVE_EPSILON};

/// Removes points within `tol` of an earlier point, keeping first occurrences.
pub fn dedup_points(points: &[Vec3], tol: f64) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (p - q).norm() <= tol) {
            out.push(*p);
        }
    }
    out
}

/// Volume of the convex hull of `points`. Points are deduplicated at
/// `1e-9 · extent` first; fewer than four distinct points, or a coplanar,
/// collinear or coincident set, gives `0`.
pub fn convex_hull_volume(points: &PointCloud3) -> f64 {
    let extent = bounding_diagonal(points.points());
    if !(extent > 0.0 && extent.is_finite()) {
        return 0.0;
    }
    let tol = RELATIVE_EPSILON * extent;
    let pts = dedup_points(points.points(), tol);
    match Hull::build(&pts, tol) {
        Some(hull) => hull.volume().max(0.0),
        None => 0.0,
    }
}

fn bounding_diagonal(points: &[Vec3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = Vec3::repeat(f64::MAX);
    let mut hi = Vec3::repeat(f64::MIN);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(pts: &[Vec3], v: [usize; 3]) -> Self {
        let n = (pts[v[1]] - pts[v[0]]).cross(&(pts[v[2]] - pts[v[0]]));
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { Vec3::zeros() };
        Self {
            v,
            normal,
            offset: normal.dot(&pts[v[0]]),
            alive: true,
        }
    }

    fn distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

struct Hull<'a> {
    pts: &'a [Vec3],
    faces: Vec<Face>,
    interior: Vec3,
}

impl<'a> Hull<'a> {
    fn build(pts: &'a [Vec3], tol: f64) -> Option<Self> {
        let [a, b, c, d] = initial_simplex(pts, tol)?;
        let interior = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;
        let mut hull = Hull {
            pts,
            faces: [[a, c, b], [a, b, d], [b, c, d], [c, a, d]]
                .into_iter()
                .map(|v| Face::new(pts, v))
                .collect(),
            interior,
        };
        for (i, p) in pts.iter().enumerate() {
            if i == a || i == b || i == c || i == d {
                continue;
            }
            hull.add_point(i, p, tol);
        }
        Some(hull)
    }

    fn add_point(&mut self, index: usize, p: &Vec3, tol: f64) {
        let visible: Vec<usize> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.distance(p) > tol)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            return;
        }
        let edges: HashSet<(usize, usize)> = visible
            .iter()
            .flat_map(|&fi| {
                let [x, y, z] = self.faces[fi].v;
                [(x, y), (y, z), (z, x)]
            })
            .collect();
        // Horizon edges keep their orientation so the new faces stay outward.
        let mut horizon: Vec<(usize, usize)> =
            edges.iter().copied().filter(|&(x, y)| !edges.contains(&(y, x))).collect();
        horizon.sort_unstable();
        for &fi in &visible {
            self.faces[fi].alive = false;
        }
        for (x, y) in horizon {
            self.faces.push(Face::new(self.pts, [x, y, index]));
        }
    }

    fn volume(&self) -> f64 {
        let c = self.interior;
        self.faces
            .iter()
            .filter(|f| f.alive)
            .map(|f| {
                let [a, b, d] = f.v.map(|i| self.pts[i] - c);
                a.dot(&b.cross(&d))
            })
            .sum::<f64>()
            / 6.0
    }
}

/// Four affinely independent points with positive orientation, or `None` when
/// the set has rank below 3 at tolerance `tol`.
fn initial_simplex(pts: &[Vec3], tol: f64) -> Option<[usize; 4]> {
    if pts.len() < 4 {
        return None;
    }
    let a = (0..pts.len()).min_by(|&i, &j| pts[i].x.total_cmp(&pts[j].x))?;
    let b = argmax(pts, |p| (p - pts[a]).norm());
    if (pts[b] - pts[a]).norm() <= tol {
        return None;
    }
    let dir = (pts[b] - pts[a]).normalize();
    let line_dist = |p: &Vec3| {
        let r = p - pts[a];
        (r - dir * r.dot(&dir)).norm()
    };
    let c = argmax(pts, line_dist);
    if line_dist(&pts[c]) <= tol {
        return None;
    }
    let normal = (pts[b] - pts[a]).cross(&(pts[c] - pts[a])).normalize();
    let plane_dist = |p: &Vec3| normal.dot(&(p - pts[a]));
    let d = argmax(pts, |p| plane_dist(p).abs());
    if plane_dist(&pts[d]).abs() <= tol {
        return None;
    }
    Some(if plane_dist(&pts[d]) > 0.0 { [a, b, c, d] } else { [a, c, b, d] })
}

fn argmax(pts: &[Vec3], key: impl Fn(&Vec3) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::MIN;
    for (i, p) in pts.iter().enumerate() {
        let v = key(p);
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::OrientedBox3;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(p: &[[f64; 3]]) -> PointCloud3 {
        PointCloud3(p.iter().map(|v| Vec3::from(*v)).collect())
    }

    #[test]
    fn unit_cube_volume() {
        let pts = PointCloud3(OrientedBox3::unit().vertices().to_vec());
        assert_abs_diff_eq!(convex_hull_volume(&pts), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tetrahedron_volume() {
        let pts = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_abs_diff_eq!(convex_hull_volume(&pts), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_sets_have_zero_volume() {
        assert_eq!(convex_hull_volume(&PointCloud3::default()), 0.0);
        assert_eq!(convex_hull_volume(&cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])), 0.0);
        let coplanar = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.3, 0.2, 0.0]]);
        assert_eq!(convex_hull_volume(&coplanar), 0.0);
        let collinear = cloud(&[[0.0; 3], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]]);
        assert_eq!(convex_hull_volume(&collinear), 0.0);
        assert_eq!(convex_hull_volume(&cloud(&[[1.0, 2.0, 3.0]; 6])), 0.0);
    }

    #[test]
    fn duplicates_and_interior_points_ignored() {
        let mut pts = OrientedBox3::unit().vertices().to_vec();
        pts.extend(OrientedBox3::unit().vertices().iter().map(|v| v + Vec3::repeat(1e-13)));
        pts.push(Vec3::new(0.1, -0.2, 0.3));
        pts.push(Vec3::new(0.5, 0.0, 0.0));
        assert_abs_diff_eq!(convex_hull_volume(&PointCloud3(pts)), 1.0, epsilon = 1e-12);
    }

    /// Brute-force hull: every plane through three points with all points on
    /// one side is a supporting plane; each such facet polygon is fanned from
    /// the centroid of the cloud.
    fn brute_force_volume(pts: &[Vec3]) -> f64 {
        let n = pts.len();
        let centroid = pts.iter().sum::<Vec3>() / n as f64;
        let mut planes: Vec<(Vec3, f64)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                    if nrm.norm() < 1e-12 {
                        continue;
                    }
                    let mut nrm = nrm.normalize();
                    let mut off = nrm.dot(&pts[i]);
                    if nrm.dot(&centroid) > off {
                        nrm = -nrm;
                        off = -off;
                    }
                    if pts.iter().all(|p| nrm.dot(p) <= off + 1e-10)
                        && !planes.iter().any(|(m, o)| (m - nrm).norm() < 1e-8 && (o - off).abs() < 1e-8)
                    {
                        planes.push((nrm, off));
                    }
                }
            }
        }
        let mut vol = 0.0;
        for (nrm, off) in planes {
            let on: Vec<Vec3> = pts.iter().copied().filter(|p| (nrm.dot(p) - off).abs() < 1e-10).collect();
            let fc = on.iter().sum::<Vec3>() / on.len() as f64;
            let u = (on[0] - fc).normalize();
            let w = nrm.cross(&u);
            let mut ordered = on.clone();
            ordered.sort_by(|a, b| {
                let ta = (a - fc).dot(&w).atan2((a - fc).dot(&u));
                let tb = (b - fc).dot(&w).atan2((b - fc).dot(&u));
                ta.total_cmp(&tb)
            });
            for t in 0..ordered.len() {
                let a = ordered[t] - centroid;
                let b = ordered[(t + 1) % ordered.len()] - centroid;
                vol += (fc - centroid).dot(&a.cross(&b)).abs() / 6.0;
            }
        }
        vol
    }

    #[test]
    fn random_sphere_points_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut pts = Vec::new();
            while pts.len() < 20 {
                let p = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if p.norm() <= 1.0 {
                    pts.push(p);
                }
            }
            let hull = convex_hull_volume(&PointCloud3(pts.clone()));
            assert!(hull <= 4.0 / 3.0 * std::f64::consts::PI);
            assert_abs_diff_eq!(hull, brute_force_volume(&pts), epsilon = 1e-12);
        }
    }

    #[test]
    fn random_box_corner_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rot = crate::geom::rot_x(rng.gen_range(0.0..6.3)) * crate::geom::rot_y(rng.gen_range(0.0..6.3));
            let s = Vec3::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            let b = OrientedBox3::new(rot, Vec3::new(1.0, -2.0, 0.5), s).unwrap();
            let vol = convex_hull_volume(&PointCloud3(b.vertices().to_vec()));
            assert_abs_diff_eq!(vol, b.volume(), epsilon = 1e-12 * b.volume().max(1.0));
        }
    }
}
