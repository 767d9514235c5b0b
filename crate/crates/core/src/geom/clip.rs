//! Sutherland-Hodgman clipping of convex polygons against an origin-centered
//! axis-aligned box.

use super::{GeometryError, Vec3, RELATIVE_EPSILON};

/// Planar convex polygon, counterclockwise about its outward normal. An empty
/// vertex list is the empty polygon.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvexPolygon3 {
    vertices: Vec<Vec3>,
}

impl ConvexPolygon3 {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates planarity and convexity. Tolerances scale with the polygon's
    /// extent.
    pub fn from_vertices(vertices: Vec<Vec3>) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Ok(Self::empty());
        }
        if vertices.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(GeometryError::NonFinite("polygon vertex"));
        }
        let poly = Self { vertices };
        if poly.vertices.len() < 3 {
            return Err(GeometryError::InvalidPolygon("fewer than 3 vertices"));
        }
        let normal = poly.normal().ok_or(GeometryError::InvalidPolygon("zero area"))?;
        let extent = poly.extent();
        let tol = 1e-9 * extent.max(f64::MIN_POSITIVE);
        let centroid = poly.centroid();
        let planar = poly.vertices.iter().all(|v| normal.dot(&(v - centroid)).abs() <= tol);
        let n = poly.vertices.len();
        let convex = (0..n).all(|i| {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            let c = poly.vertices[(i + 2) % n];
            (b - a).cross(&(c - b)).dot(&normal) >= -tol * extent
        });
        if !planar || !convex {
            return Err(GeometryError::InvalidPolygon("non-planar or non-convex"));
        }
        Ok(poly)
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Vec3>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Unit normal by Newell's method; `None` for degenerate polygons.
    pub fn normal(&self) -> Option<Vec3> {
        let n = self.area_vector();
        let len = n.norm();
        (len > 0.0 && len.is_finite()).then(|| n / len)
    }

    /// Twice-area-weighted normal sum halved: `area · n̂`.
    fn area_vector(&self) -> Vec3 {
        let n = self.vertices.len();
        (0..n).fold(Vec3::zeros(), |acc, i| acc + self.vertices[i].cross(&self.vertices[(i + 1) % n])) * 0.5
    }

    pub fn area(&self) -> f64 {
        self.area_vector().norm()
    }

    pub fn centroid(&self) -> Vec3 {
        if self.vertices.is_empty() {
            return Vec3::zeros();
        }
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    fn extent(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::MAX);
        let mut hi = Vec3::repeat(f64::MIN);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (hi - lo).norm()
    }
}

/// Clips `poly` to `{p : |pᵢ| ≤ half_extentsᵢ}` against the six bounding
/// planes in turn. Points within `1e-9 · box diagonal` of a plane count as
/// inside; crossing points are snapped onto the plane.
pub fn clip_polygon_to_aabb(poly: &ConvexPolygon3, half_extents: &Vec3) -> ConvexPolygon3 {
    let eps = RELATIVE_EPSILON * 2.0 * half_extents.norm();
    let mut current = poly.vertices.clone();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            if current.is_empty() {
                return ConvexPolygon3::empty();
            }
            current = clip_against_plane(&current, axis, sign, half_extents[axis], eps);
        }
    }
    dedup_ring(&mut current, eps);
    if current.len() < 3 {
        return ConvexPolygon3::empty();
    }
    ConvexPolygon3::from_vertices_unchecked(current)
}

/// Keeps the part of the ring with `sign · p[axis] ≤ limit`.
fn clip_against_plane(ring: &[Vec3], axis: usize, sign: f64, limit: f64, eps: f64) -> Vec<Vec3> {
    let inside = |p: &Vec3| sign * p[axis] <= limit + eps;
    let mut out = Vec::with_capacity(ring.len() + 2);
    let Some(mut prev) = ring.last() else {
        return out;
    };
    for cur in ring {
        match (inside(prev), inside(cur)) {
            (true, true) => out.push(*cur),
            (true, false) => out.push(crossing(prev, cur, axis, sign * limit)),
            (false, true) => {
                out.push(crossing(prev, cur, axis, sign * limit));
                out.push(*cur);
            }
            (false, false) => {}
        }
        prev = cur;
    }
    out
}

fn crossing(a: &Vec3, b: &Vec3, axis: usize, plane: f64) -> Vec3 {
    let t = (plane - a[axis]) / (b[axis] - a[axis]);
    let mut p = a + (b - a) * t;
    p[axis] = plane;
    p
}

fn dedup_ring(ring: &mut Vec<Vec3>, eps: f64) {
    ring.dedup_by(|a, b| (*a - *b).norm() <= eps);
    while ring.len() > 1 && (ring[0] - ring[ring.len() - 1]).norm() <= eps {
        ring.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square(center: Vec3, side: f64) -> ConvexPolygon3 {
        let h = side / 2.0;
        ConvexPolygon3::from_vertices(vec![
            center + Vec3::new(-h, -h, 0.0),
            center + Vec3::new(h, -h, 0.0),
            center + Vec3::new(h, h, 0.0),
            center + Vec3::new(-h, h, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn inside_polygon_is_unchanged() {
        let sq = square(Vec3::zeros(), 1.0);
        let out = clip_polygon_to_aabb(&sq, &Vec3::repeat(1.0));
        assert_eq!(out, sq);
    }

    #[test]
    fn outside_polygon_is_empty() {
        let sq = square(Vec3::new(10.0, 0.0, 0.0), 1.0);
        assert!(clip_polygon_to_aabb(&sq, &Vec3::repeat(0.5)).is_empty());
    }

    #[test]
    fn half_overlap_is_half_area() {
        let sq = square(Vec3::new(0.5, 0.0, 0.0), 1.0);
        let out = clip_polygon_to_aabb(&sq, &Vec3::repeat(0.5));
        assert_abs_diff_eq!(out.area(), 0.5, epsilon = 1e-15);
        for v in out.vertices() {
            assert!((0.0..=0.5).contains(&v.x));
            assert!((-0.5..=0.5).contains(&v.y));
        }
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn half_overlap_area_matches_sampling() {
        // Grid sampling of the square, counting points inside the box.
        let n = 400;
        let mut inside = 0;
        for i in 0..n {
            for j in 0..n {
                let x = (i as f64 + 0.5) / n as f64;
                let y = -0.5 + (j as f64 + 0.5) / n as f64;
                if x <= 0.5 && y.abs() <= 0.5 {
                    inside += 1;
                }
            }
        }
        let sampled = inside as f64 / (n * n) as f64;
        let clipped = clip_polygon_to_aabb(&square(Vec3::new(0.5, 0.0, 0.0), 1.0), &Vec3::repeat(0.5)).area();
        assert_abs_diff_eq!(sampled, clipped, epsilon = 1e-3);
    }

    #[test]
    fn diamond_clipped_to_octagon() {
        // Square rotated 45° with circumradius 1 clipped to |x|,|y| ≤ ½.
        let poly = ConvexPolygon3::from_vertices(vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
        ])
        .unwrap();
        let out = clip_polygon_to_aabb(&poly, &Vec3::new(0.5, 0.5, 1.0));
        assert_eq!(out.len(), 4);
        assert_abs_diff_eq!(out.area(), 1.0, epsilon = 1e-15);
        let poly2 = ConvexPolygon3::from_vertices(poly.vertices().iter().map(|v| v * 0.7).collect()).unwrap();
        let oct = clip_polygon_to_aabb(&poly2, &Vec3::new(0.5, 0.5, 1.0));
        assert_eq!(oct.len(), 8);
        // 0.98 diamond minus four tips of height 0.2 and base 0.4
        assert_abs_diff_eq!(oct.area(), 0.98 - 4.0 * 0.5 * 0.2 * 0.4, epsilon = 1e-12);
    }

    #[test]
    fn touching_polygon_is_kept_on_face() {
        let sq = square(Vec3::new(0.0, 0.0, 0.5), 1.0);
        let out = clip_polygon_to_aabb(&sq, &Vec3::repeat(0.5));
        assert_abs_diff_eq!(out.area(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_convex() {
        let res = ConvexPolygon3::from_vertices(vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(1.0, 0.2, 0.0),
            Vec3::new(2.0, 2.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
        ]);
        assert!(res.is_err());
        let skew = ConvexPolygon3::from_vertices(vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.3),
            Vec3::new(0.0, 1.0, 0.0),
        ]);
        assert!(skew.is_err());
    }
}
