//! Exact IoU of two arbitrarily oriented boxes.
//!
//! Both boxes are moved into the canonical frame of the first, where it is an
//! origin-centered axis-aligned box. Every face of the second box is clipped
//! against it, the second box's corners inside it are collected, and the same
//! is repeated with the roles swapped. The intersection of two boxes is
//! convex, so its volume is the volume of the convex hull of those points.

use std::f64::consts::TAU;

use super::{
    canonicalize_pair, clip_polygon_to_aabb, convex_hull_volume, dedup_points, ConvexPolygon3,
    OrientedBox3, PointCloud3, Vec3, RELATIVE_EPSILON,
};

/// Default number of rotation samples used for symmetric objects.
pub const DEFAULT_SYMMETRY_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct IoUResult {
    pub iou: f64,
    pub intersection_volume: f64,
    pub union_volume: f64,
    /// Intersection points in the canonical frame of the first box.
    pub intersection_points: Vec<Vec3>,
}

/// Continuous rotational symmetry about the box's local y axis, searched at
/// `sample_count` uniformly spaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetrySpec {
    sample_count: usize,
}

impl SymmetrySpec {
    /// `None` when `sample_count` is zero.
    pub fn new(sample_count: usize) -> Option<Self> {
        (sample_count >= 1).then_some(Self { sample_count })
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// The `k`-th sample angle, `2πk/n`. Computed from the reduced fraction so
    /// that sample sets for `n` and a multiple of `n` share exact angles.
    pub fn angle(&self, k: usize) -> f64 {
        let g = gcd(k, self.sample_count);
        TAU * (k / g) as f64 / (self.sample_count / g) as f64
    }
}

impl Default for SymmetrySpec {
    fn default() -> Self {
        Self {
            sample_count: DEFAULT_SYMMETRY_SAMPLES,
        }
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn containment_eps(reference: &OrientedBox3) -> f64 {
    RELATIVE_EPSILON * reference.diagonal()
}

/// Points of `other` (already in the canonical frame of a box with
/// `half_extents`) that bound the intersection: clipped face vertices and
/// corners inside the box.
fn one_sided_points(other: &OrientedBox3, half_extents: &Vec3, eps: f64, out: &mut Vec<Vec3>) {
    for face in other.faces() {
        out.extend_from_slice(clip_polygon_to_aabb(&face, half_extents).vertices());
    }
    let limit = half_extents.add_scalar(eps);
    out.extend(
        other
            .vertices()
            .into_iter()
            .filter(|v| v.iter().zip(limit.iter()).all(|(c, l)| c.abs() <= *l)),
    );
}

/// Faces of each box clipped against the other, all in the canonical frame
/// of `x`. For overlapping boxes these are the faces of the intersection
/// polyhedron (with touching faces possibly duplicated).
pub fn clipped_faces(x: &OrientedBox3, y: &OrientedBox3) -> Vec<ConvexPolygon3> {
    let y_in_x = canonicalize_pair(x, y).other;
    let x_in_y = canonicalize_pair(y, x).other;
    let mut faces: Vec<ConvexPolygon3> = y_in_x
        .faces()
        .iter()
        .map(|f| clip_polygon_to_aabb(f, &x.half_extents()))
        .collect();
    for f in x_in_y.faces() {
        let clipped = clip_polygon_to_aabb(&f, &y.half_extents());
        let mapped = clipped.vertices().iter().map(|p| y_in_x.to_world(p)).collect();
        faces.push(ConvexPolygon3::from_vertices_unchecked(mapped));
    }
    faces.retain(|f| !f.is_empty());
    faces
}

/// Vertices of the intersection of `x` and `y`, expressed in the canonical
/// frame of `x`. Empty for disjoint boxes.
pub fn intersection_points(x: &OrientedBox3, y: &OrientedBox3) -> PointCloud3 {
    let y_in_x = canonicalize_pair(x, y).other;
    let x_in_y = canonicalize_pair(y, x).other;
    let mut pts = Vec::with_capacity(64);
    one_sided_points(&y_in_x, &x.half_extents(), containment_eps(x), &mut pts);
    let split = pts.len();
    one_sided_points(&x_in_y, &y.half_extents(), containment_eps(y), &mut pts);
    // swapped-role points live in y's frame; y's pose in x's frame maps them back
    for p in &mut pts[split..] {
        *p = y_in_x.to_world(p);
    }
    let tol = RELATIVE_EPSILON * x.diagonal().max(y.diagonal());
    PointCloud3(dedup_points(&pts, tol))
}

/// Exact IoU of two oriented boxes.
pub fn iou_3d(x: &OrientedBox3, y: &OrientedBox3) -> IoUResult {
    let points = intersection_points(x, y);
    let (vx, vy) = (x.volume(), y.volume());
    let intersection_volume = convex_hull_volume(&points).clamp(0.0, vx.min(vy));
    let union_volume = vx + vy - intersection_volume;
    IoUResult {
        iou: (intersection_volume / union_volume).clamp(0.0, 1.0),
        intersection_volume,
        union_volume,
        intersection_points: points.0,
    }
}

/// A rotated candidate must beat the current best by more than this to
/// replace it, so rounding noise never moves the chosen angle.
const SYMMETRY_IMPROVEMENT: f64 = 1e-9;

/// Best IoU over rotations of `gt` about its local y axis, together with the
/// maximizing angle in radians. Near-ties keep the smallest sample index.
pub fn best_symmetric_rotation(gt: &OrientedBox3, pred: &OrientedBox3, sym: &SymmetrySpec) -> (f64, IoUResult) {
    let mut best = (0.0, iou_3d(gt, pred));
    for k in 1..sym.sample_count {
        let angle = sym.angle(k);
        let candidate = iou_3d(&gt.rotated_about_local_y(angle), pred);
        if candidate.iou > best.1.iou + SYMMETRY_IMPROVEMENT {
            best = (angle, candidate);
        }
    }
    best
}

/// IoU maximized over rotations of `gt` about its local y axis.
pub fn iou_3d_symmetric(gt: &OrientedBox3, pred: &OrientedBox3, sym: &SymmetrySpec) -> IoUResult {
    best_symmetric_rotation(gt, pred, sym).1
}
